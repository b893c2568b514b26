"""Finite-difference extrinsic geometry of sampled surfaces in AdS3.

A patch is a grid of SL(2,R) matrices sigma[i, j] = sigma(u_i, v_j).  All
derivatives are second-order central differences (one-sided second order
on the boundary), so every reported residual is O(h^2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ads_core as ads
from .hyperbolic_plane import (elliptic_fixed_points, inv2, mobius, uhp_to_strip,
                               z_to_strip)

OK = ""
E_SPACELIKE = "E_SPACELIKE"
E_DEGENERATE = "E_DEGENERATE"
E_CHART = "E_CHART"

COND_MAX = 1e8
FOCAL_TOL = 1e-8
J = np.array([[0.0, -1.0], [1.0, 0.0]])


# ------------------------------------------------------------ differences

def d1(F, h, axis):
    return np.gradient(F, h, axis=axis, edge_order=2)


def d2(F, h, axis):
    F = np.moveaxis(np.asarray(F, dtype=float), axis, 0)
    out = np.empty_like(F)
    out[1:-1] = F[2:] - 2 * F[1:-1] + F[:-2]
    if F.shape[0] >= 4:
        out[0] = 2 * F[0] - 5 * F[1] + 4 * F[2] - F[3]
        out[-1] = 2 * F[-1] - 5 * F[-2] + 4 * F[-3] - F[-4]
    else:
        out[0], out[-1] = out[1], out[-2]
    return np.moveaxis(out / h ** 2, 0, axis)


def spacing(axis_values):
    a = np.asarray(axis_values, dtype=float)
    if a.ndim != 1 or a.size < 3:
        raise ValueError("grid axes need at least three samples")
    h = np.diff(a)
    if np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise ValueError("grid axes must be uniform")
    return float(h[0])


def interior(a, ring=1):
    return a[ring:-ring, ring:-ring]


# ------------------------------------------------------------ patches

def align_signs(mats):
    """Choose matrix signs so neighbouring samples lie on the same sheet."""
    M = np.array(mats, dtype=float)
    for j in range(1, M.shape[1]):
        if ads.inner(M[0, j - 1], M[0, j]) > 0:
            M[0, j] *= -1
    for i in range(1, M.shape[0]):
        flip = ads.inner(M[i - 1], M[i]) > 0
        M[i][flip] *= -1
    return M


@dataclass
class SurfacePatch:
    u: np.ndarray
    v: np.ndarray
    mats: np.ndarray                  # (m, n, 2, 2)
    normals: np.ndarray | None = None  # optional exact unit normals

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.mats = np.asarray(self.mats, dtype=float)
        if self.mats.shape != (self.u.size, self.v.size, 2, 2):
            raise ValueError("mats must have shape (len(u), len(v), 2, 2)")
        self.hu = spacing(self.u)
        self.hv = spacing(self.v)
        if np.max(np.abs(np.linalg.det(self.mats) - 1)) > 1e-8:
            raise ValueError("patch samples must have determinant one")
        if np.any(ads.inner(self.mats[1:], self.mats[:-1]) > 0) or \
                np.any(ads.inner(self.mats[:, 1:], self.mats[:, :-1]) > 0):
            raise ValueError("patch is not sign-continuous (see align_signs)")

    @property
    def shape(self):
        return self.mats.shape[:2]


@dataclass
class ExtrinsicData:
    I: np.ndarray
    II: np.ndarray
    B: np.ndarray
    K: np.ndarray
    N: np.ndarray
    su: np.ndarray
    sv: np.ndarray
    flags: np.ndarray = field(default=None)


def tangents(patch: SurfacePatch):
    return d1(patch.mats, patch.hu, 0), d1(patch.mats, patch.hv, 1)


def first_form(su, sv):
    I = np.empty(su.shape[:2] + (2, 2))
    I[..., 0, 0] = ads.inner(su, su)
    I[..., 0, 1] = I[..., 1, 0] = ads.inner(su, sv)
    I[..., 1, 1] = ads.inner(sv, sv)
    return I


def _fd_normals(mats, su, sv, ok):
    N = np.full(mats.shape, np.nan)
    if np.any(ok):
        N[ok] = ads.normal_vector(mats[ok], su[ok], sv[ok])
    return N


def extrinsic(patch: SurfacePatch, use_normals=True, strict=True) -> ExtrinsicData:
    """First and second fundamental forms, shape operator and K = -1 - det B."""
    s = patch.mats
    su, sv = tangents(patch)
    I = first_form(su, sv)
    flags = np.full(patch.shape, OK, dtype=object)
    ev = np.linalg.eigvalsh(I)
    spacelike = ev[..., 0] > 0
    flags[~spacelike] = E_SPACELIKE
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(spacelike, ev[..., 1] / ev[..., 0], np.inf)
    flags[spacelike & (cond > COND_MAX)] = E_DEGENERATE
    ok = flags == OK
    if strict and not np.all(ok):
        bad = np.argwhere(~ok)[0]
        raise ValueError(f"patch node {tuple(bad)} flagged {flags[tuple(bad)]}")
    if use_normals and patch.normals is not None:
        N = np.where(ok[..., None, None], patch.normals, np.nan)
    else:
        N = _fd_normals(s, su, sv, ok)
    suu = d2(s, patch.hu, 0)
    svv = d2(s, patch.hv, 1)
    suv = d1(su, patch.hv, 1)
    II = np.empty_like(I)
    II[..., 0, 0] = -ads.inner(suu, N)
    II[..., 0, 1] = II[..., 1, 0] = -ads.inner(suv, N)
    II[..., 1, 1] = -ads.inner(svv, N)
    Isafe = np.where(ok[..., None, None], I, np.eye(2))
    B = np.linalg.solve(Isafe, II)
    B[~ok] = np.nan
    with np.errstate(invalid="ignore"):
        K = -1.0 - np.linalg.det(B)
    return ExtrinsicData(I, II, B, K, N, su, sv, flags)


def complex_structure(I):
    """J_I: rotation by +pi/2 for the metric I (same orientation as (u, v))."""
    det = I[..., 0, 0] * I[..., 1, 1] - I[..., 0, 1] ** 2
    r = 1.0 / np.sqrt(det)
    J_I = np.empty_like(I)
    J_I[..., 0, 0] = -I[..., 0, 1] * r
    J_I[..., 0, 1] = -I[..., 1, 1] * r
    J_I[..., 1, 0] = I[..., 0, 0] * r
    J_I[..., 1, 1] = I[..., 0, 1] * r
    return J_I


def brioschi_curvature(I, hu, hv):
    """Intrinsic Gauss curvature of a sampled metric (Brioschi formula)."""
    E, F, G = I[..., 0, 0], I[..., 0, 1], I[..., 1, 1]
    Eu, Ev = d1(E, hu, 0), d1(E, hv, 1)
    Fu, Fv = d1(F, hu, 0), d1(F, hv, 1)
    Gu, Gv = d1(G, hu, 0), d1(G, hv, 1)
    Evv = d2(E, hv, 1)
    Guu = d2(G, hu, 0)
    Fuv = d1(Fu, hv, 1)
    z = np.zeros_like(E)
    M1 = np.stack([np.stack([-Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2], -1),
                   np.stack([Fv - Gu / 2, E, F], -1),
                   np.stack([Gv / 2, F, G], -1)], -2)
    M2 = np.stack([np.stack([z, Ev / 2, Gu / 2], -1),
                   np.stack([Ev / 2, E, F], -1),
                   np.stack([Gu / 2, F, G], -1)], -2)
    return (np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F * F) ** 2


def gauss_defect(patch: SurfacePatch, ext: ExtrinsicData | None = None, ring=2):
    """max |K_intrinsic - (-1 - det B)| over interior nodes.

    Brioschi uses second differences of I, which is itself a first
    difference, so the default drops two boundary rings."""
    ext = ext or extrinsic(patch)
    Kint = brioschi_curvature(ext.I, patch.hu, patch.hv)
    return float(np.nanmax(np.abs(interior(Kint - ext.K, ring))))


# ------------------------------------------------------------ projections

def projections(patch: SurfacePatch, route="geodesic", ext: ExtrinsicData | None = None):
    """Left and right Gauss-map projections as complex uhp arrays.

    ``geodesic`` follows the normal geodesic a quarter period; ``dual``
    reads both points off the dual point of the tangent plane."""
    if patch.normals is not None and ext is None:
        N = patch.normals
    else:
        N = (ext or extrinsic(patch)).N
    s = patch.mats
    if route == "geodesic":
        eta2 = (s + N) / np.sqrt(2.0)
        return ads.line_of(s, eta2)
    if route == "dual":
        Ni = inv2(N)
        return elliptic_fixed_points(s @ Ni), elliptic_fixed_points(Ni @ s)
    raise ValueError(f"unknown route {route!r}")


def projection_strip(z):
    s, t = z_to_strip(z)
    return np.stack([s, t], axis=-1)


def pullback_check(patch: SurfacePatch, side="left", ext: ExtrinsicData | None = None):
    """max |pi*g - I((E +- J_I B) ., (E +- J_I B) .)| over interior nodes."""
    ext = ext or extrinsic(patch)
    pl, pr = projections(patch, ext=ext)
    z = pl if side == "left" else pr
    sign = 1.0 if side == "left" else -1.0
    P = projection_strip(z)
    Du = d1(P, patch.hu, 0)
    Dv = d1(P, patch.hv, 1)
    D = np.stack([Du, Dv], axis=-1)       # (m, n, 2 coords, 2 params)
    lam = 1.0 / np.cos(P[..., 1]) ** 2
    pull = lam[..., None, None] * np.swapaxes(D, -1, -2) @ D
    M = np.eye(2) + sign * complex_structure(ext.I) @ ext.B
    pred = np.swapaxes(M, -1, -2) @ ext.I @ M
    return float(np.nanmax(np.abs(interior(pull - pred))))


def jacobian_check(ext: ExtrinsicData):
    """max |det(E +- J_I B) - (1 + det B)| (both signs)."""
    JB = complex_structure(ext.I) @ ext.B
    target = 1.0 + np.linalg.det(ext.B)
    r = [np.abs(np.linalg.det(np.eye(2) + sg * JB) - target) for sg in (1.0, -1.0)]
    return float(np.nanmax(np.maximum(*r)))


def normal_evolution(patch: SurfacePatch, rho, ext: ExtrinsicData | None = None) -> SurfacePatch:
    """Push the patch a time-distance rho along its future normal geodesics."""
    ext = ext or extrinsic(patch)
    N = patch.normals if patch.normals is not None else ext.N
    c, s = np.cos(rho), np.sin(rho)
    jac = np.linalg.det(c * np.eye(2) + s * ext.B)
    if np.nanmin(np.abs(jac)) < FOCAL_TOL:
        raise ValueError("normal evolution reaches a focal point")
    mats = c * patch.mats + s * N
    normals = -s * patch.mats + c * N
    out = SurfacePatch(patch.u, patch.v, mats, normals)
    ev = np.linalg.eigvalsh(first_form(*tangents(out)))
    if np.any(ev[..., 0] <= 0):
        raise ValueError("evolved patch is not spacelike")
    return out


# ------------------------------------------------------------ graphs

@dataclass
class ChartFunction:
    """t = u(x, y) sampled on a uniform grid of the affine chart."""
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray  # (len(x), len(y))

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != (self.x.size, self.y.size):
            raise ValueError("u must have shape (len(x), len(y))")
        self.hx = spacing(self.x)
        self.hy = spacing(self.y)


def graph_curvature(cf: ChartFunction, chart_tol=1e-6, space_tol=1e-6):
    """det B of the graph t = u(x, y); returns (detB, K, flags)."""
    X, Y = np.meshgrid(cf.x, cf.y, indexing="ij")
    u = cf.u
    ux, uy = d1(u, cf.hx, 0), d1(u, cf.hy, 1)
    uxx, uyy = d2(u, cf.hx, 0), d2(u, cf.hy, 1)
    uxy = d1(ux, cf.hy, 1)
    w = 1.0 + u * u - X * X - Y * Y
    g = 1.0 - ux * ux - uy * uy + (X * ux + Y * uy - u) ** 2
    flags = np.full(u.shape, OK, dtype=object)
    flags[g <= space_tol] = E_SPACELIKE
    flags[w < chart_tol] = E_CHART
    with np.errstate(divide="ignore", invalid="ignore"):
        detB = (uxx * uyy - uxy * uxy) * w * w / (g * g)
    # nodes whose stencil touches a sample outside the chart image
    flags[(flags == OK) & ~np.isfinite(detB)] = E_CHART
    detB = np.where(flags == OK, detB, np.nan)
    return detB, -1.0 - detB, flags
