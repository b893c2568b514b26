import json
import math
import subprocess
import sys

import numpy as np
import pytest

from adsksurf import formats
from adsksurf.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, HOOKS_ENV, main

SMALL = ["--t-min", "-1.0", "--t-max", "-0.5", "--s-min", "-0.5", "--s-max", "0.5"]


def run(args, capsys=None):
    code = main([str(a) for a in args])
    out = capsys.readouterr() if capsys is not None else None
    return code, out


# ------------------------------------------------------------ barrier

def test_barrier_writes_files(tmp_path, capsys):
    code, out = run(["barrier", "--theta", math.pi / 3, "--n", 24, "--chart-h", 0.05,
                     "--out", tmp_path, "--json"], capsys)
    assert code == EXIT_OK
    summary = json.loads(out.out)
    assert summary["files"] == ["profile.json", "patch.csv", "affine.csv", "graph.csv"]
    assert summary["det_b_target"] == pytest.approx(1 / 3)
    assert abs(summary["det_b_mean"] - 1 / 3) < 1e-2
    assert "det B mean" in out.err
    meta, patch = formats.read_patch(tmp_path / "patch.csv")
    assert patch.shape == (24, 24)
    assert float(meta["theta"]) == math.pi / 3
    prof = json.loads((tmp_path / "profile.json").read_text())
    assert len(prof["t"]) == 24
    _, cols, tab = formats.read_csv(tmp_path / "affine.csv")
    assert cols == formats.AFFINE_COLUMNS and tab["x"].size == 24 * 24


def test_barrier_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert run(["barrier", "--theta", 2.0, "--n", 16, "--chart-h", 0, "--out", tmp_path / d])[0] == 0
    for name in ("profile.json", "patch.csv", "affine.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert not (tmp_path / "a" / "graph.csv").exists()


@pytest.mark.parametrize("args", [
    ["--theta", 0.0],
    ["--theta", 3.5],
    ["--theta", 1.0, "--t-min", -0.3, "--t-max", -0.5],
    ["--theta", 1.0, "--t-max", 0.2],
    ["--theta", 1.0, "--n", 4],
    ["--theta", 1.0, "--grid-h", -0.1],
])
def test_barrier_usage_errors(tmp_path, capsys, args):
    code, out = run(["barrier", *args, "--out", tmp_path], capsys)
    assert code == EXIT_USAGE
    assert "error:" in out.err
    assert not (tmp_path / "patch.csv").exists()


# ------------------------------------------------------------ verify

def test_verify_passes_and_is_deterministic(tmp_path, capsys):
    code, out = run(["verify", "--out", tmp_path / "r1.json"], capsys)
    assert code == EXIT_OK
    assert "FAIL" not in out.err
    assert "residual ratio" in out.err
    code, _ = run(["verify", "--out", tmp_path / "r2.json"], capsys)
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()
    rep = json.loads((tmp_path / "r1.json").read_text())
    assert rep["pass"] is True
    assert {"first_ff", "shape", "gauss", "codazzi", "monge_ampere", "nesting"} <= set(rep["suites"])
    for r in rep["suites"].values():
        assert set(r) >= {"pass", "max_residual", "tolerance"}


def test_verify_suite_selection_and_tolerances(capsys):
    code, out = run(["verify", "--suite", "cross_ratio", "--json"], capsys)
    assert code == EXIT_OK
    assert list(json.loads(out.out)["suites"]) == ["cross_ratio"]
    # an impossible tolerance turns the suite into a failure
    code, _ = run(["verify", "--suite", "cross_ratio", "--tol", "cross_ratio=1e-30"], capsys)
    assert code == EXIT_FAIL
    code, _ = run(["verify", "--suite", "cross_ratio", "--tol", "bogus=1"], capsys)
    assert code == EXIT_USAGE
    code, _ = run(["verify", "--theta", 4.0], capsys)
    assert code == EXIT_USAGE


def test_fault_injection_is_gated(monkeypatch, capsys):
    monkeypatch.delenv(HOOKS_ENV, raising=False)
    code, out = run(["verify", "--suite", "representation", "--inject-fault", "codazzi"], capsys)
    assert code == EXIT_USAGE and HOOKS_ENV in out.err
    monkeypatch.setenv(HOOKS_ENV, "1")
    code, out = run(["verify", "--suite", "representation", "--inject-fault", "codazzi"], capsys)
    assert code == EXIT_FAIL
    assert "FAIL codazzi" in out.err
    code, _ = run(["verify", "--inject-fault", "nothing"], capsys)
    assert code == EXIT_USAGE


# ------------------------------------------------------------ curvature

@pytest.fixture(scope="module")
def small_barrier(tmp_path_factory):
    d = tmp_path_factory.mktemp("barrier")
    code = main(["barrier", "--theta", str(math.pi / 2), *SMALL, "--grid-h", "5e-3",
                 "--chart-h", "5e-3", "--out", str(d)])
    assert code == EXIT_OK
    return d


def interior_k(path):
    _, _, tab = formats.read_csv(path, numeric=("u", "v", "K"))
    u, v = np.unique(tab["u"]), np.unique(tab["v"])
    K = tab["K"].reshape(u.size, v.size)
    ok = (tab["code"] == "OK").reshape(K.shape)
    return K[2:-2, 2:-2][ok[2:-2, 2:-2]], tab


def test_curvature_modes_agree(small_barrier, tmp_path, capsys):
    lie, aff = tmp_path / "lie.csv", tmp_path / "aff.csv"
    assert run(["curvature", small_barrier / "patch.csv", "--mode", "lie", "--out", lie], capsys)[0] == 0
    assert run(["curvature", small_barrier / "graph.csv", "--mode", "affine", "--out", aff], capsys)[0] == 0
    Kl, _ = interior_k(lie)
    Ka, tab = interior_k(aff)
    assert Kl.size > 1000 and Ka.size > 1000
    assert abs(Kl.mean() - Ka.mean()) < 1e-4
    # both equal -1 - tan^2(pi/4) = -2 node by node, up to O(h^2)
    assert np.abs(Kl + 2).max() < 2e-4
    assert np.abs(Ka + 2).max() < 1e-3
    assert set(tab["code"]) <= {"OK", "E_CHART", "E_SPACELIKE", "E_DEGENERATE"}
    assert "E_CHART" in set(tab["code"])


def test_curvature_input_errors(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n1,2\n")
    assert run(["curvature", p, "--mode", "affine"], capsys)[0] == EXIT_USAGE
    assert run(["curvature", tmp_path / "none.csv", "--mode", "lie"], capsys)[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["curvature", str(p), "--mode", "other"])
    assert exc.value.code == 2


# ------------------------------------------------------------ qsnorm

def test_qsnorm_examples(tmp_path, capsys):
    code, out = run(["qsnorm", "--map", "identity", "--n", 64], capsys)
    assert code == EXIT_OK and float(out.out) == 0.0
    code, out = run(["qsnorm", "--map", "moebius", "--params", "2,1,1,1", "--n", 64], capsys)
    assert code == EXIT_OK and float(out.out) < 1e-8
    code, out = run(["qsnorm", "--map", "moebius", "--params", "1,2,2,1"], capsys)
    assert code == EXIT_USAGE
    table = tmp_path / "pw.csv"
    formats.write_csv(table, ("break", "a", "b", "c", "d"), [(0, 1, 0, 0, 1), (math.inf, 2, 0, 0, 1)])
    code, out = run(["qsnorm", "--map", "piecewise", "--table", table, "--n", 128, "--json"], capsys)
    assert code == EXIT_OK
    est = json.loads(out.out)["estimate"]
    assert math.log(2) - 1e-12 <= est < 2
    assert run(["qsnorm", "--map", "piecewise"], capsys)[0] == EXIT_USAGE
    assert run(["qsnorm", "--n", 0], capsys)[0] == EXIT_USAGE


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "adsksurf", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("barrier", "verify", "curvature", "qsnorm"):
        assert cmd in r.stdout
