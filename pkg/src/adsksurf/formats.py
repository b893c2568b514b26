"""Plain-text file formats shared by the command line tools.

CSV files start with ``# key=value`` comment lines (tolerances, theta,
grid parameters), then a header row, then one row per node.  Floats are
written with 17 significant digits so identical runs give identical bytes.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .hyperbolic_plane import canonical_sign
from .surface_calculus import ChartFunction, SurfacePatch, align_signs

FLOAT = "{:.16e}"
PATCH_COLUMNS = ("u", "v", "a", "b", "c", "d")
CHART_COLUMNS = ("x", "y", "u")
AFFINE_COLUMNS = ("x", "y", "t")
TENSOR_COLUMNS = ("s", "t", "b11", "b12", "b21", "b22")


class FormatError(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return FLOAT.format(v)


def _meta_value(v):
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def write_csv(path, columns, rows, meta=None):
    """rows: iterable of sequences (floats or strings)."""
    lines = [f"# {k}={_meta_value(v)}" for k, v in sorted((meta or {}).items())]
    lines.append(",".join(columns))
    for r in rows:
        lines.append(",".join(fmt(v) for v in r))
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return text


def read_csv(path, numeric=None):
    """Return (meta, columns, table) where table maps column -> array.

    ``numeric`` lists columns parsed as floats (default: all)."""
    try:
        with open(path) as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    meta = {}
    body = []
    for ln in raw:
        if not ln.strip():
            continue
        if ln.startswith("#"):
            key, sep, val = ln[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = val.strip()
            continue
        body.append(ln)
    if not body:
        raise FormatError(f"{path}: no header row")
    columns = tuple(c.strip() for c in body[0].split(","))
    rows = [ln.split(",") for ln in body[1:]]
    if any(len(r) != len(columns) for r in rows):
        raise FormatError(f"{path}: ragged rows")
    numeric = columns if numeric is None else numeric
    table = {}
    for k, c in enumerate(columns):
        vals = [r[k].strip() for r in rows]
        if c in numeric:
            try:
                table[c] = np.array([float(v) for v in vals])
            except ValueError as exc:
                raise FormatError(f"{path}: column {c!r} is not numeric") from exc
        else:
            table[c] = np.array(vals, dtype=object)
    return meta, columns, table


def _require(columns, wanted, path):
    missing = [c for c in wanted if c not in columns]
    if missing:
        raise FormatError(f"{path}: missing columns {missing}")


def _grid_axes(a, b, path):
    """Recover tensor-grid axes from flattened node coordinates (row major)."""
    ua = np.unique(a)
    ub = np.unique(b)
    if ua.size * ub.size != a.size:
        raise FormatError(f"{path}: nodes do not form a tensor grid")
    ia = np.searchsorted(ua, a)
    ib = np.searchsorted(ub, b)
    order = np.lexsort((ib, ia))
    if np.any(ia[order] != np.repeat(np.arange(ua.size), ub.size)) or \
            np.any(ib[order] != np.tile(np.arange(ub.size), ua.size)):
        raise FormatError(f"{path}: duplicate nodes")
    return ua, ub, order


# ------------------------------------------------------------ patches

def patch_rows(patch: SurfacePatch):
    M = canonical_sign(patch.mats)
    U, V = np.meshgrid(patch.u, patch.v, indexing="ij")
    return np.column_stack([U.ravel(), V.ravel(), M[..., 0, 0].ravel(), M[..., 0, 1].ravel(),
                            M[..., 1, 0].ravel(), M[..., 1, 1].ravel()])


def write_patch(path, patch, meta=None):
    return write_csv(path, PATCH_COLUMNS, patch_rows(patch), meta)


def read_patch(path):
    meta, cols, tab = read_csv(path)
    _require(cols, PATCH_COLUMNS, path)
    u, v, order = _grid_axes(tab["u"], tab["v"], path)
    ent = np.stack([tab[c][order] for c in ("a", "b", "c", "d")], -1)
    mats = ent.reshape(u.size, v.size, 2, 2)
    try:
        patch = SurfacePatch(u, v, align_signs(mats))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return meta, patch


# ------------------------------------------------------------ chart graphs

def chart_rows(cf: ChartFunction):
    X, Y = np.meshgrid(cf.x, cf.y, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel(), cf.u.ravel()])


def write_chart(path, cf, meta=None):
    return write_csv(path, CHART_COLUMNS, chart_rows(cf), meta)


def read_chart(path):
    meta, cols, tab = read_csv(path)
    # x,y,t triples on a grid are accepted as a graph t = u(x, y)
    zc = "u" if "u" in cols else "t"
    _require(cols, ("x", "y", zc), path)
    x, y, order = _grid_axes(tab["x"], tab["y"], path)
    try:
        cf = ChartFunction(x, y, tab[zc][order].reshape(x.size, y.size))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return meta, cf


def write_tensor(path, field, meta=None):
    S, T = np.meshgrid(field.s, field.t, indexing="ij")
    D = field.data
    rows = np.column_stack([S.ravel(), T.ravel(), D[..., 0, 0].ravel(), D[..., 0, 1].ravel(),
                            D[..., 1, 0].ravel(), D[..., 1, 1].ravel()])
    return write_csv(path, TENSOR_COLUMNS, rows, meta)


# ------------------------------------------------------------ json

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=1, sort_keys=True) + "\n"


def write_json(path, obj):
    text = dumps(obj)
    if path is not None:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text
