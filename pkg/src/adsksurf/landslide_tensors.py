"""Landslide data on the strip chart: sqrt tensors, Codazzi tests, qs norms.

Tensors are (1,1)-tensors written in the (d_s, d_t) frame, so matrices act
on coordinate vectors and the metric is conformal (lambda = 1/cos^2 t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hyperbolic_plane import INFINITY, apply_boundary, cross_ratio, rotation_about
from .surface_calculus import d1, interior, spacing

J = np.array([[0.0, -1.0], [1.0, 0.0]])
EYE = np.eye(2)


@dataclass
class DiffeoGrid:
    """Samples of a diffeomorphism Phi of H^2 in strip coordinates.

    ``domain`` and ``values`` have shape (..., 2); ``dphi`` is the Jacobian
    d(s', t')/d(s, t).  When it is not supplied it is obtained by central
    differences on the tensor grid (s, t)."""
    domain: np.ndarray
    values: np.ndarray
    dphi: np.ndarray | None = None
    s: np.ndarray | None = None
    t: np.ndarray | None = None

    def __post_init__(self):
        self.domain = np.asarray(self.domain, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.domain.shape != self.values.shape or self.domain.shape[-1] != 2:
            raise ValueError("domain and values must both have shape (..., 2)")
        for a in (self.domain, self.values):
            if np.any(np.abs(a[..., 1]) >= 0.5 * np.pi):
                raise ValueError("points must satisfy |t| < pi/2")
        if self.dphi is None:
            if self.s is None or self.t is None:
                raise ValueError("finite differences need the grid axes")
            hs, ht = spacing(self.s), spacing(self.t)
            D = np.empty(self.values.shape + (2,))
            D[..., 0] = d1(self.values, hs, 0)
            D[..., 1] = d1(self.values, ht, 1)
            self.dphi = D
        self.dphi = np.asarray(self.dphi, dtype=float)
        det = np.linalg.det(self.dphi)
        if np.any(det <= 0):
            raise ValueError("Phi must be an orientation-preserving diffeomorphism")

    @classmethod
    def from_map(cls, func, s, t, jac=None):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        S, T = np.meshgrid(s, t, indexing="ij")
        Sp, Tp = func(S, T)
        dom = np.stack([S, T], -1)
        val = np.stack([np.broadcast_to(Sp, S.shape), np.broadcast_to(Tp, S.shape)], -1)
        return cls(dom, val, None if jac is None else jac(S, T), s, t)

    @property
    def is_grid(self):
        return self.s is not None and self.t is not None


@dataclass
class Tensor2Field:
    data: np.ndarray  # (..., 2, 2)
    s: np.ndarray | None = None
    t: np.ndarray | None = None
    domain: np.ndarray | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)


def sqrt_tensor(grid: DiffeoGrid) -> Tensor2Field:
    """b0 = sqrt(g^-1 Phi^* g): g-self-adjoint, positive definite."""
    t, tp = grid.domain[..., 1], grid.values[..., 1]
    D = grid.dphi
    P = ((np.cos(t) / np.cos(tp)) ** 2)[..., None, None] * (np.swapaxes(D, -1, -2) @ D)
    det = np.linalg.det(P)
    tr = np.trace(P, axis1=-2, axis2=-1)
    if np.any(det <= 0) or np.any(tr <= 0):
        raise ValueError("pull-back metric is not positive definite")
    sd = np.sqrt(det)
    b0 = (P + sd[..., None, None] * EYE) / np.sqrt(tr + 2 * sd)[..., None, None]
    return Tensor2Field(b0, grid.s, grid.t, grid.domain)


def rotate_b(b0: Tensor2Field, theta):
    """b = (cos rho E + sin rho J) b0 with cos rho = 2 cos(theta) / tr b0."""
    tr = np.trace(b0.data, axis1=-2, axis2=-1)
    c = 2 * math.cos(theta) / tr
    if np.any(np.abs(c) > 1 + 1e-12):
        raise ValueError("trace of b0 too small for this theta")
    rho = np.arccos(np.clip(c, -1.0, 1.0))
    R = np.cos(rho)[..., None, None] * EYE + np.sin(rho)[..., None, None] * J
    return Tensor2Field(R @ b0.data, b0.s, b0.t, b0.domain), rho


def codazzi_vector(b: Tensor2Field):
    """d^nabla b (d_s, d_t) in coordinate components."""
    if b.s is None or b.t is None:
        raise ValueError("Codazzi test needs a tensor grid")
    hs, ht = spacing(b.s), spacing(b.t)
    B = b.data
    tn = np.tan(b.t)[None, :]
    b11, b12, b21, b22 = B[..., 0, 0], B[..., 0, 1], B[..., 1, 0], B[..., 1, 1]
    Ds = d1(b12, hs, 0) + tn * b22 - d1(b11, ht, 1) - tn * b11
    Dt = d1(b22, hs, 0) - tn * b12 - d1(b21, ht, 1) - tn * b21
    return np.stack([Ds, Dt], -1)


def codazzi_residual(b: Tensor2Field):
    """Per-node size of d^nabla b on a g-orthonormal frame."""
    D = codazzi_vector(b)
    return np.cos(b.t)[None, :] * np.linalg.norm(D, axis=-1)


def max_codazzi(b: Tensor2Field, ring=1):
    return float(np.max(interior(codazzi_residual(b), ring)))


@dataclass
class LandslideClass:
    theta: float
    is_landslide: bool
    is_minimal_lagrangian: bool
    is_isometry: bool
    det_residual: float
    codazzi_residual: float
    theta_spread: float


def pointwise_theta(b0: Tensor2Field):
    """theta(x) solving the Codazzi condition for R_rho b0 node by node."""
    hs, ht = spacing(b0.s), spacing(b0.t)
    W = codazzi_vector(b0)
    tau = np.trace(b0.data, axis1=-2, axis2=-1)
    ts, tt = d1(tau, hs, 0), d1(tau, ht, 1)
    Jb = J @ b0.data
    V = ts[..., None] * Jb[..., :, 1] - tt[..., None] * Jb[..., :, 0]
    vv = np.sum(V * V, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = -np.sum(W * V, -1) / vv
        c = k * tau ** 2 / (2 * np.sqrt(1 + (k * tau) ** 2))
    return np.arccos(np.clip(c, -1, 1)), vv


def classify(grid: DiffeoGrid, det_tol=1e-6, codazzi_tol=1e-3, ring=2, theta_tol=1e-3) -> LandslideClass:
    """Decide whether Phi is a theta-landslide; theta is recovered to O(h^2),
    so the minimal Lagrangian test (theta = pi/2) uses ``theta_tol``."""
    b0 = sqrt_tensor(grid)
    det_res = float(np.max(np.abs(np.linalg.det(b0.data) - 1)))
    if det_res > det_tol:
        return LandslideClass(math.nan, False, False, False, det_res, math.nan, math.nan)
    if np.max(np.abs(b0.data - EYE)) < det_tol:
        return LandslideClass(0.0, True, False, True, det_res, 0.0, 0.0)
    th, vv = pointwise_theta(b0)
    th, vv = interior(th, ring), interior(vv, ring)
    use = vv > 1e-12 * max(vv.max(), 1e-300)
    if not np.any(use):
        # constant trace: only the Codazzi test on b0 itself decides
        res = max_codazzi(b0, ring)
        ok = res < codazzi_tol
        return LandslideClass(0.5 * math.pi, ok, ok, False, det_res, res, 0.0)
    theta = float(np.median(th[use]))
    spread = float(np.ptp(th[use]))
    res = max_codazzi(rotate_b(b0, theta)[0], ring)
    ok = res < codazzi_tol
    return LandslideClass(theta, ok, ok and abs(theta - 0.5 * math.pi) < theta_tol,
                          False, det_res, res, spread)


# ------------------------------------------------------------ boundary maps

class PiecewiseMobius:
    """Boundary map applying ``mats[k]`` on (breaks[k-1], breaks[k]]."""

    def __init__(self, breaks, mats):
        if len(breaks) != len(mats):
            raise ValueError("one break point per piece")
        self.breaks = [float(b) for b in breaks]
        self.mats = [np.asarray(m, dtype=float).reshape(2, 2) for m in mats]
        if not math.isinf(self.breaks[-1]):
            raise ValueError("last piece must extend to infinity")
        for m in self.mats:
            if abs(np.linalg.det(m)) < 1e-14:
                raise ValueError("degenerate Moebius piece")

    def __call__(self, x):
        if math.isinf(x):
            return apply_boundary(self.mats[-1], INFINITY)
        for b, m in zip(self.breaks, self.mats):
            if x <= b:
                return apply_boundary(m, x)
        return apply_boundary(self.mats[-1], x)


def mobius_map(M):
    M = np.asarray(M, dtype=float).reshape(2, 2)
    if abs(np.linalg.det(M)) < 1e-14:
        raise ValueError("degenerate Moebius map")
    return lambda x: apply_boundary(M, x)


def moebius_family(samples=512):
    """Deterministic sample of PSL(2,R): identity first, then a Halton set."""
    from scipy.stats import qmc
    out = [np.eye(2)]
    if samples > 1:
        pts = qmc.Halton(d=3, scramble=False).random(samples - 1)
        for a, l, c in pts:
            K = rotation_about(1j, np.pi * a)
            lam = math.exp(6.0 * l - 3.0)
            NA = np.array([[lam, 6.0 * c - 3.0], [0.0, 1.0]])
            out.append(NA @ K)
    return out


SYMMETRIC = (-1.0, 0.0, 1.0, INFINITY)


def qs_norm_estimate(f, samples=512):
    """sup |log|cr(f(Q))|| over symmetric quadruples Q = mu(-1, 0, 1, inf).

    |cr(Q)| = 1 exactly, so log|cr(Q)| is subtracted to cancel the rounding
    of the sampled quadruple itself (the identity then scores exactly 0)."""
    best = 0.0
    for M in moebius_family(samples):
        Q = [apply_boundary(M, p) for p in SYMMETRIC]
        img = [f(q) for q in Q]
        cr = cross_ratio(*img)
        if cr >= 0:
            raise ValueError("boundary map does not preserve cyclic order")
        best = max(best, abs(math.log(-cr) - math.log(-cross_ratio(*Q))))
    return best
