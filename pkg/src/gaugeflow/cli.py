"""Command-line driver: ``gaugeflow {verify,minimize,gaugefix,eval,chern}``.

Settings come from built-in defaults, then an optional ``--config`` file
of ``key = value`` lines, then explicit flags.  Exit status is 0 on
success, 1 on non-convergence or a failed check, 2 on bad usage,
configuration or input.  All randomness flows from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass, fields, replace

import numpy as np

__all__ = ["RunConfig", "ConfigError", "load_config_file", "build_parser", "main"]

GROUPS = {"u1": 1, "su2": 2, "su3": 3}
FUNCTIONALS = {"Y": "Yn", "Yn": "Yn", "Z": "Zn", "Zn": "Zn", "YM": "YM", "YMn": "YMn"}


class ConfigError(ValueError):
    """Invalid configuration (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    m: int = 2
    N: int = 32
    k: int = 2
    n: int = 2
    functional: str = "Y"
    group: str = "su2"
    seed: int = 1
    amplitude: float = 0.05
    band_limit: int = 2
    tol: float = 1e-6
    max_iter: int = 5000
    kappa: float = 0.1
    out: str = "."
    json: bool = False
    threads: int = 1
    resolutions: tuple = (16, 32, 64)
    only: tuple = ()
    ladder: tuple = ()
    momentum: bool = False
    regauge_every: int = 0
    record_every: int = 1
    audit: bool = False

    def validate(self):
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got n={self.n}")
        if not 2 <= self.m <= 2 * self.n:
            raise ConfigError(f"constraint m <= 2n violated: m={self.m}, n={self.n}")
        if self.N % 2 or self.N < 8:
            raise ConfigError(f"N must be even and >= 8, got N={self.N}")
        if self.group not in GROUPS:
            raise ConfigError(f"unknown group {self.group!r}; choose from {sorted(GROUPS)}")
        if GROUPS[self.group] != self.k:
            raise ConfigError(f"group {self.group} needs k={GROUPS[self.group]}, got k={self.k}")
        if self.functional not in FUNCTIONALS:
            raise ConfigError(f"unknown functional {self.functional!r}; choose from {sorted(FUNCTIONALS)}")
        if not 1 <= self.band_limit <= self.N // 2:
            raise ConfigError(f"band_limit must lie in [1, N/2], got {self.band_limit} for N={self.N}")
        if self.amplitude < 0:
            raise ConfigError("amplitude must be >= 0")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for N in self.resolutions + self.ladder:
            if N % 2 or N < 8:
                raise ConfigError(f"resolutions must be even and >= 8, got {N}")
        if self.ladder and any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError(f"ladder resolutions must increase, got {list(self.ladder)}")
        return self


def _int_list(text):
    try:
        return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _convert(name, value):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            return value if isinstance(value, bool) else _bool(value)
        if kind == "tuple":
            if name == "only":
                return tuple(v for v in str(value).replace(" ", "").split(",") if v)
            return _int_list(value)
        return str(value)
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {name}") from None


def load_config_file(path):
    """Parse ``key = value`` lines (``#`` starts a comment) into a dict."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value.strip())
    return out


def _common(p):
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--m", type=int, help="torus dimension")
    p.add_argument("--N", type=int, help="grid points per axis")
    p.add_argument("--k", type=int, help="matrix size")
    p.add_argument("--n", type=int, help="functional order")
    p.add_argument("--group", help="structure group: u1, su2 or su3")
    p.add_argument("--seed", type=int)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--band-limit", dest="band_limit", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--json", action="store_const", const=True, default=None, help="machine-readable output")
    p.add_argument("--threads", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="gaugeflow", description="Gauge-invariant functionals on flat tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the identity catalog")
    _common(p)
    p.add_argument("--resolutions", help="comma-separated N values (default 16,32,64)")
    p.add_argument("--only", help="comma-separated case ids")
    p.add_argument("--audit", action="store_const", const=True, default=None,
                   help="also run the gradient audit for Y_2, Y_3, Z_2, Z_3")

    p = sub.add_parser("minimize", help="minimise a functional from a seeded connection")
    _common(p)
    p.add_argument("--functional", help="Y, Z, YM or YMn")
    p.add_argument("--ladder", help="comma-separated increasing resolutions for grid continuation")
    p.add_argument("--momentum", action="store_const", const=True, default=None)
    p.add_argument("--regauge-every", dest="regauge_every", type=int)
    p.add_argument("--record-every", dest="record_every", type=int)

    for name, text in (("gaugefix", "Coulomb gauge fixing of a snapshot"),
                       ("eval", "evaluate all functionals on a snapshot"),
                       ("chern", "Chern-Weil densities of a snapshot")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("snapshot", help="connection snapshot file")
        if name == "gaugefix":
            p.add_argument("--kappa", type=float, help="curvature smallness threshold (warning only)")
    return parser


def resolve_config(args):
    """Merge defaults, the config file and explicit flags into a validated config."""
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    names = {f.name for f in fields(RunConfig)}
    for key, value in vars(args).items():
        if key in names and value is not None:
            values[key] = _convert(key, value)
    if "group" in values and "k" not in values:
        values["k"] = GROUPS.get(values["group"], -1)
    elif "k" in values and "group" not in values:
        values["group"] = {v: g for g, v in GROUPS.items()}.get(values["k"], f"k{values['k']}")
    return replace(RunConfig(), **values).validate()


def _set_threads(n):
    # kernels are serial; only touch the threading layer when asked to
    if n == 1:
        return
    try:
        import numba
    except ImportError:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _emit(cfg, payload, lines):
    if cfg.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def _outdir(cfg):
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def cmd_verify(cfg, args):
    from .functionals import FunctionalSpec
    from .verify import gradient_audit, run_catalog

    dims = [cfg.m] if args.m is not None else None
    report = run_catalog(cfg.resolutions, only=list(cfg.only) or None, dims=dims)
    out = _outdir(cfg)
    report.to_csv(os.path.join(out, "verify.csv"))
    ok = report.passed
    audits = {}
    if cfg.audit:
        for kind, n in (("Yn", 2), ("Yn", 3), ("Zn", 2), ("Zn", 3)):
            a = gradient_audit(FunctionalSpec(kind, n), [cfg.seed, cfg.seed + 1, cfg.seed + 2])
            audits[f"{kind}{n}"] = {"max_error": {repr(t): e for t, e in a.max_error.items()}, "pass": a.passed}
            ok = ok and a.passed
    if cfg.json:
        payload = {"pass": ok, "rows": [dict(zip(("case", "N", "residual", "order", "pass"),
                                                (c, N, r, None if np.isnan(o) else o, p)))
                                       for c, N, r, o, p in report.rows()], "audit": audits}
        _emit(cfg, payload, [])
    else:
        print(report.summary())
        for name, a in audits.items():
            print(f"{'PASS' if a['pass'] else 'FAIL'}  gradient audit {name}: {a['max_error']}")
    return 0 if ok else 1


def cmd_minimize(cfg, args):
    from .forms import GridSpec
    from .functionals import FunctionalSpec, sobolev_profile
    from .gaugefix import coulomb_residual
    from .io import write_snapshot
    from .minimize import MinimizeOptions, continuation_ladder, minimize
    from .sampling import random_form

    spec = FunctionalSpec(FUNCTIONALS[cfg.functional], cfg.n)
    opts = MinimizeOptions(max_iter=cfg.max_iter, grad_tol=cfg.tol, seed=cfg.seed,
                           record_every=cfg.record_every, momentum=cfg.momentum,
                           regauge_every=cfg.regauge_every)
    start_N = cfg.ladder[0] if cfg.ladder else cfg.N
    grid = GridSpec(cfg.m, start_N, cfg.k, cfg.n)
    A0 = random_form(cfg.m, 1, cfg.k, cfg.seed, cfg.amplitude, min(cfg.band_limit, start_N // 2)).sample(grid)
    trace = continuation_ladder(spec, A0, cfg.ladder, opts) if cfg.ladder else minimize(spec, A0, opts)
    out = _outdir(cfg)
    trace.to_csv(os.path.join(out, "trace.csv"))
    write_snapshot(os.path.join(out, "final.gf"), trace.connection, group=cfg.group)
    A = trace.connection
    profile = sobolev_profile(A, cfg.n)
    payload = {
        "functional": str(spec), "converged": trace.converged, "iterations": trace.iterations,
        "value": trace.final_value, "grad_norm": trace.final_grad_norm,
        "coulomb_residual": coulomb_residual(A), "sobolev_profile": profile,
    }
    _emit(cfg, payload, [
        f"{spec} on T^{cfg.m}, N={A.grid.N}: {'converged' if trace.converged else 'NOT converged'} "
        f"after {trace.iterations} iterations",
        f"value            {trace.final_value:.10e}",
        f"grad_norm        {trace.final_grad_norm:.6e}",
        f"coulomb_residual {payload['coulomb_residual']:.6e}",
        "sobolev_profile  " + " ".join(f"{v:.6e}" for v in profile),
    ])
    return 0 if trace.converged else 1


def _read_connection(path, cfg):
    from .io import read_snapshot

    A, meta = read_snapshot(path, n=cfg.n)
    if A.degree != 1:
        raise ConfigError(f"{path}: expected a connection (degree=1), got degree={A.degree}")
    if A.grid.m > 2 * cfg.n:
        raise ConfigError(f"constraint m <= 2n violated: snapshot has m={A.grid.m}, n={cfg.n}")
    return A


def cmd_gaugefix(cfg, args):
    from .gaugefix import HISTORY_COLUMNS, fix_coulomb, uhlenbeck_report
    from .io import write_snapshot

    A = _read_connection(args.snapshot, cfg)
    result = fix_coulomb(A, tol=cfg.tol, max_iter=cfg.max_iter, kappa=cfg.kappa, n=cfg.n)
    out = _outdir(cfg)
    write_snapshot(os.path.join(out, "omega.gf"), result.omega)
    with open(os.path.join(out, "gaugefix.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(HISTORY_COLUMNS) + "\n")
        for it, energy, res, step in result.history:
            fh.write(f"{it},{energy!r},{res!r},{step!r}\n")
    payload = {"converged": result.converged, "iterations": result.iterations, "residual": result.residual}
    lines = [f"Coulomb gauge: {'converged' if result.converged else 'NOT converged'} after "
             f"{result.iterations} iterations, residual {result.residual:.6e}"]
    if result.converged:
        rep = uhlenbeck_report(result, cfg.n)
        payload["uhlenbeck"] = {"lhs": rep.lhs, "rhs": rep.rhs, "ratio": rep.ratio, "lhs_terms": rep.lhs_terms}
        lines.append(f"Uhlenbeck report (n={cfg.n}): lhs {rep.lhs:.6e} rhs {rep.rhs:.6e} ratio {rep.ratio:.6e}")
    _emit(cfg, payload, lines)
    return 0 if result.converged else 1


def cmd_eval(cfg, args):
    from .chern import chern_integral
    from .functionals import FunctionalSpec, evaluate, sobolev_profile
    from .gaugefix import coulomb_residual

    A = _read_connection(args.snapshot, cfg)
    values = {str(FunctionalSpec(kind, cfg.n)): evaluate(FunctionalSpec(kind, cfg.n), A)
              for kind in ("YM", "YMn", "Yn", "Zn")}
    profile = sobolev_profile(A, cfg.n)
    chern = {}
    for j in range(1, A.grid.k + 1):
        if 2 * j == A.grid.m:
            chern[f"p{j}"] = chern_integral(A, j)
    payload = {"functionals": values, "sobolev_profile": profile,
               "coulomb_residual": coulomb_residual(A), "chern_integrals": chern}
    lines = [f"{name:<10} {v:.10e}" for name, v in values.items()]
    lines.append("sobolev_profile  " + " ".join(f"{v:.6e}" for v in profile))
    lines.append(f"coulomb_residual {payload['coulomb_residual']:.6e}")
    lines += [f"integral {name}  {v:.6e}" for name, v in chern.items()]
    _emit(cfg, payload, lines)
    return 0


def cmd_chern(cfg, args):
    from .chern import chern_density, chern_integral, closedness_residual
    from .io import write_snapshot

    A = _read_connection(args.snapshot, cfg)
    out = _outdir(cfg)
    payload = {}
    lines = []
    for j in range(1, A.grid.k + 1):
        if 2 * j > A.grid.m:
            break
        dens = chern_density(A, j)
        write_snapshot(os.path.join(out, f"chern_p{j}.gf"), dens.field)
        entry = {"max_abs_density": float(np.abs(dens.field.data).max())}
        if 2 * j == A.grid.m:
            entry["integral"] = chern_integral(A, j)
        else:
            entry["closedness_residual"] = closedness_residual(A, j)
        payload[f"p{j}"] = entry
        lines.append(f"p{j}: " + " ".join(f"{k} {v:.6e}" for k, v in entry.items()))
    _emit(cfg, payload, lines)
    return 0


COMMANDS = {"verify": cmd_verify, "minimize": cmd_minimize, "gaugefix": cmd_gaugefix,
            "eval": cmd_eval, "chern": cmd_chern}


def main(argv=None):
    from .io import SnapshotError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"gaugeflow {args.command}: configuration error: {exc}", file=sys.stderr)
        return 2
    _set_threads(cfg.threads)
    try:
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, SnapshotError) as exc:
        print(f"gaugeflow {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gaugeflow {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
