import math

import numpy as np
import pytest

from adsksurf import formats
from adsksurf.formats import FormatError
from adsksurf.surface_calculus import ChartFunction

from conftest import barrier_case


def test_float_format_roundtrips_exactly():
    rng = np.random.default_rng(0)
    for v in rng.normal(size=50) * 10.0 ** rng.integers(-12, 12, 50):
        assert float(formats.fmt(v)) == v
    assert formats.fmt(math.nan) == "nan"
    assert formats.fmt(-math.inf) == "-inf"
    assert formats.fmt("OK") == "OK"


def test_csv_layout(tmp_path):
    p = tmp_path / "a.csv"
    text = formats.write_csv(p, ("x", "code"), [(1.5, "OK"), (2.0, "E_CHART")], {"z": 1, "a": 0.5})
    lines = text.splitlines()
    assert lines[0] == "# a=5.0000000000000000e-01"
    assert lines[1] == "# z=1"
    assert lines[2] == "x,code"
    assert lines[3] == "1.5000000000000000e+00,OK"
    meta, cols, tab = formats.read_csv(p, numeric=("x",))
    assert meta == {"a": "5.0000000000000000e-01", "z": "1"}
    assert cols == ("x", "code")
    assert tab["x"].tolist() == [1.5, 2.0]
    assert tab["code"].tolist() == ["OK", "E_CHART"]


def test_csv_errors(tmp_path):
    with pytest.raises(FormatError):
        formats.read_csv(tmp_path / "missing.csv")
    p = tmp_path / "bad.csv"
    p.write_text("# only=meta\n")
    with pytest.raises(FormatError, match="header"):
        formats.read_csv(p)
    p.write_text("x,y\n1,2\n3\n")
    with pytest.raises(FormatError, match="ragged"):
        formats.read_csv(p)
    p.write_text("x,y\n1,oops\n")
    with pytest.raises(FormatError, match="numeric"):
        formats.read_csv(p)


def test_patch_roundtrip(tmp_path):
    _, out = barrier_case(math.pi / 2)
    p = tmp_path / "patch.csv"
    formats.write_patch(p, out.patch, {"theta": math.pi / 2})
    meta, patch = formats.read_patch(p)
    assert float(meta["theta"]) == math.pi / 2
    assert np.array_equal(patch.u, out.patch.u) and np.array_equal(patch.v, out.patch.v)
    assert np.array_equal(patch.mats, out.patch.mats) or np.array_equal(patch.mats, -out.patch.mats)
    # shuffled rows describe the same grid
    lines = p.read_text().splitlines()
    head = [ln for ln in lines if ln.startswith("#")] + [lines[len([x for x in lines if x.startswith("#")])]]
    body = lines[len(head):]
    rng = np.random.default_rng(1)
    rng.shuffle(body)
    q = tmp_path / "shuffled.csv"
    q.write_text("\n".join(head + body) + "\n")
    _, patch2 = formats.read_patch(q)
    assert np.abs(np.abs(patch2.mats) - np.abs(patch.mats)).max() == 0.0


def test_patch_errors(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("u,v,a,b\n0,0,1,0\n")
    with pytest.raises(FormatError, match="missing"):
        formats.read_patch(p)
    rows = [(0, 0, 1, 0, 0, 1), (0, 1, 1, 0, 0, 1), (1, 0, 1, 0, 0, 1)]
    formats.write_csv(p, formats.PATCH_COLUMNS, rows)
    with pytest.raises(FormatError, match="tensor grid"):
        formats.read_patch(p)
    rows = [(u, v, 2, 0, 0, 2) for u in range(3) for v in range(3)]
    formats.write_csv(p, formats.PATCH_COLUMNS, rows)
    with pytest.raises(FormatError, match="determinant"):
        formats.read_patch(p)


def test_chart_roundtrip(tmp_path):
    x = np.linspace(-0.3, 0.3, 7)
    y = np.linspace(-0.2, 0.2, 5)
    u = np.add.outer(x ** 2, y)
    u[0, 0] = np.nan
    p = tmp_path / "g.csv"
    formats.write_chart(p, ChartFunction(x, y, u))
    _, cf = formats.read_chart(p)
    assert np.array_equal(cf.x, x) and np.array_equal(cf.y, y)
    assert np.array_equal(cf.u, u, equal_nan=True)
    # affine x,y,t triples are accepted too
    q = tmp_path / "a.csv"
    X, Y = np.meshgrid(x, y, indexing="ij")
    formats.write_csv(q, formats.AFFINE_COLUMNS, np.column_stack([X.ravel(), Y.ravel(), u.ravel()]))
    assert np.array_equal(formats.read_chart(q)[1].u, u, equal_nan=True)


def test_json_is_canonical(tmp_path):
    obj = {"b": np.float64(1.5), "a": [np.int64(2), np.bool_(True)], "c": math.inf, "d": np.arange(2)}
    text = formats.dumps(obj)
    assert text.index('"a"') < text.index('"b"')
    assert '"inf"' in text
    assert formats.write_json(tmp_path / "r.json", obj) == text
    assert (tmp_path / "r.json").read_text() == text
