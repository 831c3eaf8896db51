import json

import numpy as np
import pytest

from conftest import sample_form
from gaugeflow.cli import ConfigError, load_config_file, main
from gaugeflow.forms import GridSpec
from gaugeflow.io import fixture_path, read_snapshot, write_snapshot
from gaugeflow.sampling import abelian_benchmark


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fixture_is_the_benchmark():
    A, meta = read_snapshot(fixture_path())
    assert A.grid.N == 64 and meta["group"] == "su2"
    assert A.data.tobytes() == abelian_benchmark().sample(GridSpec(2, 64)).data.tobytes()


def test_eval_json_round_trips(capsys):
    code, out, _ = run(capsys, "eval", fixture_path(), "--json")
    assert code == 0
    payload = json.loads(out)
    assert json.loads(json.dumps(payload)) == payload
    assert payload["functionals"]["Yn(n=2)"] == pytest.approx(4 * np.pi**2, rel=1e-3)
    assert payload["chern_integrals"]["p1"] == 0.0
    code, text, _ = run(capsys, "eval", fixture_path())
    assert code == 0 and "Yn(n=2)" in text


def test_minimize_writes_trace_and_snapshot(tmp_path, capsys):
    out = tmp_path / "run"
    code, text, _ = run(capsys, "minimize", "--N", "16", "--out", str(out))
    assert code == 0 and "converged" in text
    assert (out / "trace.csv").read_text().startswith("iter,value,grad_norm,step\n")
    A, meta = read_snapshot(out / "final.gf")
    assert A.grid.N == 16 and meta["group"] == "su2"


def test_minimize_reports_non_convergence(tmp_path, capsys):
    code, text, _ = run(capsys, "minimize", "--N", "16", "--max-iter", "3", "--out", str(tmp_path))
    assert code == 1 and "NOT converged" in text


def test_reruns_are_bitwise_identical(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(capsys, "minimize", "--N", "16", "--seed", "4", "--out", str(tmp_path / name))[0] == 0
        assert run(capsys, "verify", "--only", "hodge_involution,jacobi", "--resolutions", "8,16",
                   "--m", "2", "--out", str(tmp_path / name))[0] == 0
    for f in ("trace.csv", "verify.csv", "final.gf"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_gaugefix_and_chern(tmp_path, capsys):
    with pytest.warns(RuntimeWarning, match="smallness threshold"):
        code, text, _ = run(capsys, "gaugefix", fixture_path(), "--out", str(tmp_path), "--json")
    assert code == 0
    payload = json.loads(text)
    assert payload["converged"] and "uhlenbeck" in payload
    assert (tmp_path / "omega.gf").exists() and (tmp_path / "gaugefix.csv").exists()
    code, text, _ = run(capsys, "chern", fixture_path(), "--out", str(tmp_path), "--json")
    assert code == 0 and json.loads(text)["p1"]["integral"] == 0.0
    dens, _ = read_snapshot(tmp_path / "chern_p1.gf")
    assert dens.grid.k == 1 and dens.degree == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nN = 16\nseed = 2\nmax-iter = 4\n")
    assert load_config_file(cfg) == {"N": 16, "seed": 2, "max_iter": 4}
    code, text, _ = run(capsys, "minimize", "--config", str(cfg), "--max-iter", "2000",
                        "--out", str(tmp_path), "--json")
    payload = json.loads(text)
    assert code == 0 and payload["converged"] and payload["iterations"] > 4


@pytest.mark.parametrize("argv,needle", [
    (["minimize", "--m", "5"], "m <= 2n"),
    (["minimize", "--N", "15"], "even"),
    (["minimize", "--band-limit", "20", "--N", "32"], "band_limit"),
    (["minimize", "--group", "su3", "--k", "2"], "group"),
    (["minimize", "--functional", "Q"], "functional"),
])
def test_bad_config_exits_2(argv, needle, tmp_path, capsys):
    code, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert code == 2 and needle in err


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        load_config_file(cfg)
    assert run(capsys, "minimize", "--config", str(cfg))[0] == 2
    assert run(capsys, "minimize", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "eval")[0] == 2


def test_malformed_snapshot_exits_2(tmp_path, capsys):
    raw = open(fixture_path(), "rb").read()
    bad = tmp_path / "bad.gf"
    bad.write_bytes(raw[:1000])
    code, _, err = run(capsys, "eval", str(bad))
    assert code == 2 and "byte offset" in err
    assert run(capsys, "eval", str(tmp_path / "nope.gf"))[0] == 2


def test_snapshot_must_be_a_connection(tmp_path, capsys):
    path = tmp_path / "two.gf"
    write_snapshot(path, sample_form(2, 2, 8, 1))
    code, _, err = run(capsys, "eval", str(path))
    assert code == 2 and "degree=1" in err
