"""Identity harness: exact checks, convergence-order checks and gradient audits.

Every identity of the covariant calculus that the toolkit relies on is
listed in :func:`identity_catalog`.  A case is one of

* ``exact``: holds in floating point on any grid; passes when the
  residual, relative to the larger side, is at most ``EXACT_TOL``;
* ``order``: holds up to the O(h^4) Leibniz error of the stencil; passes
  when the observed order ``log(r_N / r_2N) / log 2`` is at least
  ``expected_order - ORDER_SLACK`` for every refinement step;
* ``bound``: a pointwise inequality; passes when the worst relative
  violation is at most ``BOUND_TOL``.

Fields are band-limited and seeded, so every resolution samples the same
continuum field.  Exact cases run tile by tile (see
:mod:`gaugeflow.windows`) and so scale to ``T^4`` with ``N = 64``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .connection import (
    CovariantTensor,
    conjugate_form,
    covariant_codiff,
    covariant_d,
    curvature,
    full_covariant_derivative,
    gauge_transform_connection,
    rough_laplacian,
    weitzenbock_curvature_term,
)
from .forms import (
    FormField,
    GridSpec,
    codifferential,
    discrete_inner,
    ext_d,
    graded_bracket,
    hodge_star,
    lp_norm,
    partial,
    pointwise_norm_sq,
)
from .functionals import FunctionalSpec, evaluate, gradient
from .liealg import random_group_element
from .sampling import random_form, random_gauge
from .windows import DEFAULT_BUDGET, STENCIL_REACH, tiled_functionals, tiled_reduce

__all__ = [
    "EXACT_TOL",
    "ORDER_SLACK",
    "BOUND_TOL",
    "AUDIT_TOL",
    "REPORT_COLUMNS",
    "IdentityCase",
    "CaseResult",
    "VerifyReport",
    "AuditReport",
    "identity_catalog",
    "run_identity",
    "run_catalog",
    "gradient_audit",
]

EXACT_TOL = 1e-11
ORDER_SLACK = 0.3
BOUND_TOL = 1e-6
AUDIT_TOL = 1e-6
REPORT_COLUMNS = ("case", "N", "residual", "order", "pass")


@dataclass(frozen=True)
class IdentityCase:
    """One catalog entry; the field generator is ``(seed, band_limit, amplitude)``.

    ``dims`` are the torus dimensions the catalog runs by default and
    ``min_dim`` the smallest dimension in which the identity is defined.
    """

    id: str
    exactness: str
    description: str
    expected_order: float = 3.8
    seed: int = 1
    band_limit: int = 1
    amplitude: float = 0.5
    dims: tuple = (3,)
    k: int = 2
    min_dim: int = 2

    def __post_init__(self):
        if self.exactness not in ("exact", "order", "bound"):
            raise ValueError(f"unknown exactness {self.exactness!r}")
        if self.exactness == "order" and not self.expected_order > 0:
            raise ValueError("order cases need expected_order > 0")

    def form(self, m, degree, offset=0, amplitude=None):
        amp = self.amplitude if amplitude is None else amplitude
        return random_form(m, degree, self.k, 1000 * self.seed + offset, amp, self.band_limit)

    def gauge(self, m, offset=0):
        return random_gauge(m, self.k, 1000 * self.seed + 500 + offset, self.amplitude, self.band_limit)


@dataclass
class CaseResult:
    case: IdentityCase
    m: int
    resolutions: list
    residuals: list
    orders: list
    passed: bool

    @property
    def label(self):
        return f"{self.case.id}[m={self.m}]"

    def rows(self):
        out = []
        for i, (N, r) in enumerate(zip(self.resolutions, self.residuals)):
            order = self.orders[i - 1] if i > 0 else float("nan")
            if self.case.exactness == "exact":
                ok = r <= EXACT_TOL
            elif self.case.exactness == "bound":
                ok = r <= BOUND_TOL
            else:
                ok = self.passed
            out.append((self.label, N, r, order, ok))
        return out


@dataclass
class VerifyReport:
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def rows(self):
        return [row for r in self.results for row in r.rows()]

    def to_csv(self, path=None):
        """``case,N,residual,order,pass``; floats use ``repr`` so reruns compare bitwise."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for label, N, r, order, ok in self.rows():
            w.writerow([label, N, repr(float(r)), "" if np.isnan(order) else repr(float(order)), int(ok)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    def summary(self):
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            res = " ".join(f"{x:.2e}" for x in r.residuals)
            orders = " ".join(f"{o:.2f}" for o in r.orders)
            tail = f" orders {orders}" if orders else ""
            lines.append(f"{status}  {r.label:<44} [{r.case.exactness}] residuals {res}{tail}")
        n_pass = sum(r.passed for r in self.results)
        lines.append(f"{n_pass}/{len(self.results)} cases passed")
        return "\n".join(lines)


# -- helpers -------------------------------------------------------------


def _ratio(sums):
    """``sqrt(Σ diff^2 / max(Σ lhs^2, Σ rhs^2))`` with 0/0 read as 0."""
    scale = max(sums.get("lhs", 0.0), sums.get("rhs", 0.0))
    if scale == 0.0:
        return 0.0 if sums["diff"] == 0.0 else np.inf
    return float(np.sqrt(sums["diff"] / scale))


def _sq(data, m):
    return pointwise_norm_sq(data, m)


def _norm_ratio(diff, lhs, rhs):
    scale = max(lp_norm(lhs), lp_norm(rhs))
    return 0.0 if scale == 0.0 else lp_norm(diff) / scale


def _crop(tile, obj, depth):
    """Drop the ``depth`` polluted stencil layers of a tile-local result."""
    return tile.shrink(obj, STENCIL_REACH * depth)


# -- exact cases (tiled) -------------------------------------------------


def _graded_bracket_symmetry(case, grid, budget):
    m = grid.m
    pairs = [(p, q) for p, q in ((0, 1), (1, 1), (1, 2), (2, 2)) if p + q <= m]

    def compute(tile):
        out = {"diff": 0.0, "lhs": 0.0, "rhs": 0.0}
        for i, (p, q) in enumerate(pairs):
            B = case.form(m, p, 10 * i).sample(grid, tile.index)
            C = case.form(m, q, 10 * i + 1).sample(grid, tile.index)
            lhs = graded_bracket(B, C)
            rhs = graded_bracket(C, B) * (-1.0 if (p * q) % 2 == 0 else 1.0)
            out["diff"] = out["diff"] + _sq((lhs - rhs).data, m)
            out["lhs"] = out["lhs"] + _sq(lhs.data, m)
            out["rhs"] = out["rhs"] + _sq(rhs.data, m)
        return out

    return _ratio(tiled_reduce(grid, compute, 0, budget))


def _hodge_involution(case, grid, budget):
    m = grid.m

    def compute(tile):
        out = {"diff": 0.0, "lhs": 0.0, "rhs": 0.0}
        for p in range(m + 1):
            B = case.form(m, p, p).sample(grid, tile.index)
            lhs = hodge_star(hodge_star(B))
            rhs = B * (-1.0 if (p * (m + 1)) % 2 else 1.0)
            out["diff"] = out["diff"] + _sq((lhs - rhs).data, m)
            out["lhs"] = out["lhs"] + _sq(lhs.data, m)
            out["rhs"] = out["rhs"] + _sq(rhs.data, m)
        return out

    return _ratio(tiled_reduce(grid, compute, 0, budget))


def _pair_density(B, C):
    """Site array of ``Σ_I <B_I, C_I>``."""
    return -np.einsum("c...ab,c...ba->...", B.data, C.data).real


def _d_adjointness(case, grid, budget):
    m = grid.m
    worst = 0.0
    for p in range(m):

        def compute(tile, p=p):
            a = case.form(m, p, 2 * p).sample(grid, tile.index)
            b = case.form(m, p + 1, 2 * p + 1).sample(grid, tile.index)
            da, dsb = _crop(tile, ext_d(a), 1), _crop(tile, codifferential(b), 1)
            a, b = _crop(tile, a, 1), _crop(tile, b, 1)
            return {"lhs": _pair_density(da, b), "rhs": _pair_density(a, dsb),
                    "da": _sq(da.data, m), "b": _sq(b.data, m),
                    "a": _sq(a.data, m), "dsb": _sq(dsb.data, m)}

        s = tiled_reduce(grid, compute, 1, budget)
        # Cauchy-Schwarz bound of the larger side
        scale = max(np.sqrt(s["da"] * s["b"]), np.sqrt(s["a"] * s["dsb"]))
        if scale > 0.0:
            worst = max(worst, abs(s["lhs"] - s["rhs"]) / scale)
    return worst


def _jacobi(case, grid, budget):
    m = grid.m
    triples = [t for t in ((0, 0, 0), (1, 1, 0), (1, 1, 1)) if sum(t) <= m]

    def compute(tile):
        out = {"diff": 0.0, "lhs": 0.0}
        for i, (p, q, r) in enumerate(triples):
            X = case.form(m, p, 10 * i).sample(grid, tile.index)
            Y = case.form(m, q, 10 * i + 1).sample(grid, tile.index)
            Z = case.form(m, r, 10 * i + 2).sample(grid, tile.index)
            t1 = graded_bracket(X, graded_bracket(Y, Z)) * (-1.0 if (p * r) % 2 else 1.0)
            t2 = graded_bracket(Y, graded_bracket(Z, X)) * (-1.0 if (q * p) % 2 else 1.0)
            t3 = graded_bracket(Z, graded_bracket(X, Y)) * (-1.0 if (r * q) % 2 else 1.0)
            out["diff"] = out["diff"] + _sq((t1 + t2 + t3).data, m)
            # scale by the largest single term
            big = max((_sq(t.data, m) for t in (t1, t2, t3)), key=lambda d: float(np.sum(d)))
            out["lhs"] = out["lhs"] + big
        return out

    return _ratio(tiled_reduce(grid, compute, 0, budget))


def _ad_isometry(case, grid, budget):
    m = grid.m

    def compute(tile):
        X = case.form(m, 1, 0).sample(grid, tile.index)
        Y = case.form(m, 1, 1).sample(grid, tile.index)
        Z = case.form(m, 0, 2).sample(grid, tile.index)
        u = case.gauge(m).sample(grid, tile.index)
        zX, zY = graded_bracket(Z, X), graded_bracket(Z, Y)
        # infinitesimal: <[Z,X],Y> + <X,[Z,Y]> = 0
        inf_l, inf_r = _pair_density(zX, Y), -_pair_density(X, zY)
        # finite: <u^-1 X u, u^-1 Y u> = <X, Y>
        fin_l = _pair_density(conjugate_form(u, X), conjugate_form(u, Y))
        fin_r = _pair_density(X, Y)
        size = np.sqrt(_sq(zX.data, m) * _sq(Y.data, m)) + np.sqrt(_sq(X.data, m) * _sq(Y.data, m))
        return {"diff": (inf_l - inf_r) ** 2 + (fin_l - fin_r) ** 2, "lhs": size**2}

    return _ratio(tiled_reduce(grid, compute, 0, budget))


def _functional_constant_gauge_invariance(case, grid, budget):
    m = grid.m
    A = case.form(m, 1, 0, amplitude=0.3)
    g = random_group_element(1000 * case.seed + 7, 1.0, case.k)
    worst = 0.0
    for n in (2, 3):
        if m > 2 * n:
            continue
        if grid.N**m <= budget:
            gr = grid.with_(n=n)
            a = A.sample(gr)
            ga = a.like(g.conj().T @ a.data @ g)
            pairs = [(evaluate(FunctionalSpec(kind, n), a), evaluate(FunctionalSpec(kind, n), ga))
                     for kind in ("Yn", "Zn")]
        else:
            # large grids: n = 2 only (the critical order for m = 4)
            if n == 3:
                continue
            gr = grid.with_(n=n)
            base = tiled_functionals(A, gr, n, budget=budget)
            moved = tiled_functionals(A, gr, n, gauge=g, budget=budget)
            pairs = [(base["Y"], moved["Y"]), (base["Z"], moved["Z"])]
        for v, w in pairs:
            scale = max(abs(v), abs(w))
            if scale > 0.0:
                worst = max(worst, abs(v - w) / scale)
    return worst


# -- order cases (whole grid) --------------------------------------------


def _fields(case, grid):
    A = case.form(grid.m, 1, 0).sample(grid)
    u = case.gauge(grid.m).sample(grid)
    return A, u, gauge_transform_connection(u, A)


def _curvature_equivariance(case, grid, budget):
    A, u, uA = _fields(case, grid)
    lhs, rhs = curvature(uA), conjugate_form(u, curvature(A))
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _codiff_covariance(case, grid, budget):
    A, u, uA = _fields(case, grid)
    B = case.form(grid.m, 2, 3).sample(grid)
    lhs = covariant_codiff(uA, conjugate_form(u, B))
    rhs = conjugate_form(u, covariant_codiff(A, B))
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _covariant_d_covariance(case, grid, budget):
    A, u, uA = _fields(case, grid)
    C = case.form(grid.m, 1, 3).sample(grid)
    lhs = covariant_d(uA, conjugate_form(u, C))
    rhs = conjugate_form(u, covariant_d(A, C))
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _tensor_norm(T):
    return float(np.sqrt(max(0.0, T.l2_norm_sq())))


def _full_derivative_covariance(case, grid, budget):
    A, u, uA = _fields(case, grid)
    C = case.form(grid.m, 2, 3).sample(grid)
    lhs = full_covariant_derivative(uA, conjugate_form(u, C))
    rhs = conjugate_form(u, full_covariant_derivative(A, C))
    diff = lhs.like(lhs.data - rhs.data)
    scale = max(_tensor_norm(lhs), _tensor_norm(rhs))
    return _tensor_norm(diff) / scale


def _double_codiff_curvature(case, grid, budget):
    A = case.form(grid.m, 1, 0).sample(grid)
    B = case.form(grid.m, 2, 3).sample(grid)
    lhs = covariant_codiff(A, covariant_codiff(A, B))
    rhs = -hodge_star(graded_bracket(curvature(A), hodge_star(B)))
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _double_d_curvature(case, grid, budget):
    A = case.form(grid.m, 1, 0).sample(grid)
    C = case.form(grid.m, 1, 3).sample(grid)
    lhs = covariant_d(A, covariant_d(A, C))
    rhs = graded_bracket(curvature(A), C)
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _bianchi(case, grid, budget):
    A = case.form(grid.m, 1, 0).sample(grid)
    F = curvature(A)
    lhs, rhs = ext_d(F), -graded_bracket(A, F)
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _functional_gauge_invariance(case, grid, budget):
    A, u, uA = _fields(case, grid)
    worst = 0.0
    for n in (2, 3):
        if grid.m > 2 * n:
            continue
        for kind in ("Yn", "Zn"):
            spec = FunctionalSpec(kind, n)
            v, w = evaluate(spec, A), evaluate(spec, uA)
            worst = max(worst, abs(v - w) / max(abs(v), abs(w)))
    return worst


def _weitzenbock(case, grid, budget):
    A = case.form(grid.m, 1, 0).sample(grid)
    B = case.form(grid.m, 2, 3).sample(grid)
    lhs = (covariant_codiff(A, covariant_d(A, B)) + covariant_d(A, covariant_codiff(A, B))
           - rough_laplacian(A, B))
    rhs = weitzenbock_curvature_term(A, B)
    return _norm_ratio(lhs - rhs, lhs, rhs)


def _kato_violation(A, B):
    """Worst ``|d|B|| - |D_A B|`` over sites, relative to ``max |D_A B|``."""
    grid = B.grid
    m, h = grid.m, grid.h
    size = np.sqrt(np.maximum(_sq(B.data, m), 0.0))[..., None, None]
    grad_sq = sum(partial(size, j, m, h)[..., 0, 0].real ** 2 for j in range(m))
    DB = full_covariant_derivative(A, CovariantTensor.from_form(B))
    cov = np.sqrt(np.maximum(DB.pointwise_norm_sq(), 0.0))
    return float(np.maximum(np.sqrt(grad_sq) - cov, 0.0).max() / cov.max())


def _kato(case, grid, budget):
    m = grid.m
    A = case.form(m, 1, 0).sample(grid)
    # a constant mode keeps |B| away from zero, where |B| is not smooth
    lift = FormField.constant(grid, 1, [_lift(case.k)] * m)
    B = case.form(m, 1, 3).sample(grid) + lift
    # equality case: A = 0 and B = f X with f > 0, where both sides agree
    f = case.form(m, 0, 4, amplitude=0.2).sample(grid).data[0, ..., 0, 1].real + 1.0
    sharp = lift.like(lift.data * f[None, ..., None, None])
    return max(_kato_violation(A, B), _kato_violation(A * 0.0, sharp))


def _lift(k):
    """A fixed nonzero algebra element of size about 2."""
    if k == 1:
        return np.array([[2j]])
    X = np.zeros((k, k), dtype=complex)
    X[0, 0], X[1, 1] = 2j, -2j
    return X


_CHECKS = {
    "graded_bracket_symmetry": _graded_bracket_symmetry,
    "hodge_involution": _hodge_involution,
    "d_adjointness": _d_adjointness,
    "jacobi": _jacobi,
    "ad_isometry": _ad_isometry,
    "functional_constant_gauge_invariance": _functional_constant_gauge_invariance,
    "curvature_equivariance": _curvature_equivariance,
    "codiff_covariance": _codiff_covariance,
    "covariant_d_covariance": _covariant_d_covariance,
    "full_derivative_covariance": _full_derivative_covariance,
    "double_codiff_curvature": _double_codiff_curvature,
    "double_d_curvature": _double_d_curvature,
    "bianchi": _bianchi,
    "functional_gauge_invariance": _functional_gauge_invariance,
    "weitzenbock": _weitzenbock,
    "kato": _kato,
}


def identity_catalog():
    """Deterministic list of every checked identity."""
    exact = dict(exactness="exact", dims=(2, 4))
    order = dict(exactness="order", dims=(3,))
    return [
        IdentityCase("graded_bracket_symmetry", description="[B,C] = (-1)^{pq+1} [C,B]", **exact),
        IdentityCase("hodge_involution", description="** = (-1)^{p(m+1)} on p-forms", **exact),
        IdentityCase("d_adjointness", description="<dα, β> = <α, d^*β> on the periodic grid", **exact),
        IdentityCase("jacobi", description="graded Jacobi identity for the bracket", **exact),
        IdentityCase("ad_isometry", description="<[Z,X],Y> + <X,[Z,Y]> = 0 and Ad-invariance of <,>", **exact),
        IdentityCase("functional_constant_gauge_invariance",
                     description="Y_n, Z_n unchanged by a constant gauge map", **exact),
        IdentityCase("curvature_equivariance", description="F_{u*A} = u^-1 F_A u", **order),
        IdentityCase("codiff_covariance", description="d^*_{u*A}(u^-1 B u) = u^-1 (d_A^* B) u", **order),
        IdentityCase("covariant_d_covariance", description="d_{u*A}(u^-1 C u) = u^-1 (d_A C) u", **order),
        IdentityCase("full_derivative_covariance", description="D_{u*A}(u^-1 C u) = u^-1 (D_A C) u", **order),
        IdentityCase("double_codiff_curvature", description="d_A^* d_A^* B = -*[F_A, *B]", **order),
        IdentityCase("double_d_curvature", description="d_A d_A C = [F_A, C]", min_dim=3, **order),
        IdentityCase("bianchi", description="d_A F_A = 0", min_dim=3, **order),
        IdentityCase("functional_gauge_invariance", description="Y_n, Z_n unchanged by a smooth gauge map",
                     **order),
        IdentityCase("weitzenbock",
                     description="(d_A^*d_A + d_A d_A^* - D_A^*D_A) B = -Σ e^i∧ι_{e_j}[F_ij, B]", min_dim=3,
                     **order),
        IdentityCase("kato", exactness="bound", description="|d|B|| <= |D_A B| pointwise", dims=(3,)),
    ]


def _orders(resolutions, residuals):
    out = []
    for (n1, r1), (n2, r2) in zip(zip(resolutions, residuals), zip(resolutions[1:], residuals[1:])):
        if r1 > 0.0 and r2 > 0.0:
            out.append(float(np.log(r1 / r2) / np.log(n2 / n1)))
        else:
            out.append(float("inf") if r2 == 0.0 else float("-inf"))
    return out


def run_identity(case, resolutions, m=None, budget=DEFAULT_BUDGET):
    """Residuals and observed orders of one case on T^m (default: its first dimension)."""
    if isinstance(case, str):
        matches = [c for c in identity_catalog() if c.id == case]
        if not matches:
            raise KeyError(f"unknown identity {case!r}")
        case = matches[0]
    if case.id not in _CHECKS:
        raise KeyError(f"unknown identity {case.id!r}")
    resolutions = list(resolutions)
    if case.exactness == "order" and len(resolutions) < 2:
        raise ValueError("order cases need at least two resolutions")
    m = case.dims[0] if m is None else m
    if m < case.min_dim:
        raise ValueError(f"{case.id} needs m >= {case.min_dim}, got m={m}")
    residuals = []
    for N in resolutions:
        grid = GridSpec(m, N, case.k, max(2, (m + 1) // 2))
        residuals.append(float(_CHECKS[case.id](case, grid, budget)))
    orders = _orders(resolutions, residuals) if len(resolutions) > 1 else []
    if case.exactness == "exact":
        passed = all(r <= EXACT_TOL for r in residuals)
    elif case.exactness == "bound":
        passed = all(r <= BOUND_TOL for r in residuals)
    else:
        passed = all(o >= case.expected_order - ORDER_SLACK for o in orders)
    return CaseResult(case, m, resolutions, residuals, orders, passed)


def run_catalog(resolutions=(16, 32, 64), only=None, dims=None, budget=DEFAULT_BUDGET, cases=None):
    """Run the catalog (or the cases named in ``only``) on each case's dimensions.

    ``dims`` overrides the dimensions; cases undefined in a requested
    dimension are skipped there.
    """
    cases = identity_catalog() if cases is None else list(cases)
    if only:
        only = [only] if isinstance(only, str) else list(only)
        known = {c.id for c in cases}
        missing = [o for o in only if o not in known]
        if missing:
            raise KeyError(f"unknown identity {missing[0]!r}")
        cases = [c for c in cases if c.id in only]
    report = VerifyReport()
    for case in cases:
        for m in (case.dims if dims is None else [d for d in dims if d >= case.min_dim]):
            report.results.append(run_identity(case, resolutions, m, budget))
    return report


# -- gradient audit ------------------------------------------------------


@dataclass
class AuditReport:
    spec: FunctionalSpec
    rows: list  # (seed, direction, t, pairing, fd, relative error)
    max_error: dict  # t -> worst relative error
    passed: bool


def _relative(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def gradient_audit(spec, seeds, m=2, N=16, k=2, n_directions=5, steps=(1e-3, 1e-4), amplitude=0.1,
                   zero=False):
    """Compare the gradient pairing with central differences.

    Connections have amplitude 0.1 and band limit ``N/8``; the directions
    are seeded from the same seed and have the same amplitude, so ``t`` is
    a relative step.  The audit passes when the error at the
    smallest step is at most ``AUDIT_TOL`` (the larger step shows the
    O(t^2) truncation trend).  ``zero=True`` audits the flat connection
    along abelian directions: every bracket vanishes there, the functional
    is even in ``t`` and both sides are exactly zero.
    """
    grid = GridSpec(m, N, k, spec.n)
    band = max(1, N // 8)
    rows = []
    for seed in seeds:
        A = random_form(m, 1, k, seed, amplitude, band).sample(grid)
        if zero:
            A = A * 0.0
        G = gradient(spec, A)
        for d in range(n_directions):
            alpha = random_form(m, 1, k, 10_000 + 100 * seed + d, amplitude, band, abelian=zero).sample(grid)
            pairing = discrete_inner(G, alpha)
            for t in steps:
                fd = (evaluate(spec, A + alpha * t) - evaluate(spec, A - alpha * t)) / (2.0 * t)
                rows.append((seed, d, t, pairing, fd, _relative(pairing, fd)))
    max_error = {t: max((r[5] for r in rows if r[2] == t), default=0.0) for t in steps}
    passed = max_error[min(steps)] <= AUDIT_TOL
    return AuditReport(spec, rows, max_error, passed)
