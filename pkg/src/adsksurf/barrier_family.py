"""The translation-invariant barrier landslides Phi_theta(s, t) = (s - phi(t), t).

For each theta in (0, pi) the profile phi solves

    phi'' (2 / (4 + phi'^2)) (1/phi' - cos(theta) / sqrt(4 sin^2 theta + phi'^2)) = -tan t

on (-pi/2, 0) with phi(0-) = +inf and phi'(-pi/2) = 0.  Separating variables
gives t = G(phi'), where G(r) = -arccos(sqrt(r) (r^2 + 4)^(-1/4) e^(F(r) - F(inf)))
and F(r) = -2 cos(theta) int_0^r du / ((4 + u^2) sqrt(4 sin^2 theta + u^2)).
Then phi(t) = int_0^{phi'(t)} r G'(r) dr.  The scalar work lives in
``kernels`` (compiled, with a pure-Python fallback).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .hyperbolic_plane import (canonical_sign, hyperbolic_translation, rotation_about,
                               strip_to_z)
from .landslide_tensors import DiffeoGrid, Tensor2Field, rotate_b, sqrt_tensor
from .representation_formula import RepInput, build_sigma

HALF_PI = 0.5 * math.pi


def check_theta(theta):
    theta = float(theta)
    if not (0.0 < theta < math.pi):
        raise ValueError("theta must lie in (0, pi)")
    return theta


def limit_slope(theta):
    """A = lim_{t -> 0-} |t| phi'(t) = sqrt(2 (1 - cos theta))."""
    return math.sqrt(2.0 * (1.0 - math.cos(theta)))


def F_integral(r, theta):
    return kernels.f_integral(float(r), check_theta(theta))


def F_infinity(theta):
    return kernels.f_infinity(check_theta(theta))


def G(r, theta):
    return kernels.g_value(float(r), check_theta(theta))


def solve_phi_prime(t, theta):
    theta = check_theta(theta)
    t = np.asarray(t, dtype=float)
    out = np.array([kernels.g_inverse(float(v), theta) for v in t.ravel()])
    return out.reshape(t.shape)


def profile_values(t, theta):
    """(phi'(t), phi(t)) for arbitrary t in (-pi/2, 0)."""
    theta = check_theta(theta)
    t = np.asarray(t, dtype=float)
    if np.any((t <= -HALF_PI) | (t >= 0)):
        raise ValueError("t must lie in (-pi/2, 0)")
    flat = t.ravel()
    uniq, inv = np.unique(flat, return_inverse=True)
    dphi, phi = kernels.profile_arrays(uniq, theta)
    return dphi[inv].reshape(t.shape), phi[inv].reshape(t.shape)


def phi_second(phi_prime, theta):
    """phi'' = 1 / G'(phi')."""
    return np.vectorize(lambda r: 1.0 / kernels.g_derivative(r, theta))(phi_prime)


def rho_xi(phi_prime, theta):
    """rho (rotation from b0 to b) and xi (angle of -b dPhi^-1)."""
    r = np.asarray(phi_prime, dtype=float)
    n = np.sqrt(4.0 + r * r)
    rho = np.arccos(2.0 * math.cos(theta) / n)
    sr = np.sin(rho)
    cr = np.cos(rho)
    cx = -(2.0 * cr + r * sr) / n
    sx = -(2.0 * sr - r * cr) / n
    xi = np.mod(np.arctan2(sx, cx), 2 * math.pi)
    return rho, xi, cx, sx


def ode_residual(t, theta, scale=1.0):
    """|k(phi') phi'' + tan t| with optional scaling of (phi', phi'')."""
    theta = check_theta(theta)
    t = np.asarray(t, dtype=float)
    r = solve_phi_prime(t, theta)
    r2 = phi_second(r, theta)
    r, r2 = scale * r, scale * r2
    c, s2 = math.cos(theta), math.sin(theta) ** 2
    k = (2.0 / (4.0 + r * r)) * (1.0 / r - c / np.sqrt(4.0 * s2 + r * r))
    return np.abs(k * r2 + np.tan(t))


def chebyshev_t(n):
    k = np.arange(n)
    return np.sort(-0.25 * math.pi * (1.0 + np.cos(math.pi * (k + 0.5) / n)))


@dataclass
class BarrierProfile:
    theta: float
    C: float
    t: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    rho: np.ndarray
    xi: np.ndarray

    def to_dict(self):
        return {"theta": self.theta, "C": self.C,
                "t": self.t.tolist(), "phi": self.phi.tolist(),
                "phi_prime": self.phi_prime.tolist(),
                "rho": self.rho.tolist(), "xi": self.xi.tolist()}

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_dict(cls, d):
        arr = {k: np.asarray(d[k], dtype=float) for k in ("t", "phi", "phi_prime", "rho", "xi")}
        return cls(float(d["theta"]), float(d["C"]), **arr)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def interpolator(self):
        """Cubic Hermite interpolant of phi using the tabulated phi'."""
        from scipy.interpolate import CubicHermiteSpline
        return CubicHermiteSpline(self.t, self.phi, self.phi_prime)


def tabulate_profile(theta, n=64, t=None) -> BarrierProfile:
    theta = check_theta(theta)
    t = chebyshev_t(n) if t is None else np.sort(np.asarray(t, dtype=float))
    dphi, phi = kernels.profile_arrays(t, theta)
    rho, xi, _, _ = rho_xi(dphi, theta)
    return BarrierProfile(theta, F_infinity(theta), t, phi, dphi, rho, xi)


# ------------------------------------------------------------ landslide data

def barrier_grid(theta, s, t) -> DiffeoGrid:
    """Phi_theta on the tensor grid s x t, with the analytic differential."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    dphi_t, phi_t = profile_values(t, theta)
    S, T = np.meshgrid(s, t, indexing="ij")
    P = np.broadcast_to(phi_t, S.shape)
    D = np.zeros(S.shape + (2, 2))
    D[..., 0, 0] = 1.0
    D[..., 0, 1] = -np.broadcast_to(dphi_t, S.shape)
    D[..., 1, 1] = 1.0
    return DiffeoGrid(np.stack([S, T], -1), np.stack([S - P, T], -1), D, s, t)


def barrier_input(theta, s, t) -> RepInput:
    theta = check_theta(theta)
    grid = barrier_grid(theta, s, t)
    b, _ = rotate_b(sqrt_tensor(grid), theta)
    return RepInput(grid, b, theta)


def barrier_b_closed(phi_prime, theta):
    """Closed form of b = R_rho b0 for the barrier."""
    r = np.asarray(phi_prime, dtype=float)
    n = np.sqrt(4.0 + r * r)
    b0 = np.empty(r.shape + (2, 2))
    b0[..., 0, 0] = 2.0 / n
    b0[..., 0, 1] = b0[..., 1, 0] = -r / n
    b0[..., 1, 1] = (2.0 + r * r) / n
    rho = np.arccos(2.0 * math.cos(theta) / n)
    c, s = np.cos(rho), np.sin(rho)
    R = np.empty(r.shape + (2, 2))
    R[..., 0, 0] = R[..., 1, 1] = c
    R[..., 0, 1] = -s
    R[..., 1, 0] = s
    return R @ b0


def barrier_surface(theta, s, t):
    inp = barrier_input(theta, s, t)
    return inp, build_sigma(inp)


def closed_form_sigma(s, t, phi, xi):
    """sigma = (strip translation by phi) o (rotation by xi about (s - phi, t))."""
    s, t, phi, xi = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (s, t, phi, xi)))
    zp = strip_to_z(s - phi, t)
    return canonical_sign(hyperbolic_translation(phi) @ rotation_about(zp, xi))


def sigma_limit(s0):
    """The expected limit I_{(s0, 0)}: the involution about i e^{s0}."""
    return np.array([[0.0, math.exp(s0)], [-math.exp(-s0), 0.0]])


def sigma_trajectory(theta, s0, t):
    """sigma(q(t)) at q(t) = (s0 + phi(t)/2, t), via build_sigma."""
    theta = check_theta(theta)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dphi, phi = profile_values(t, theta)
    q = np.stack([s0 + 0.5 * phi, t], -1)
    p = np.stack([s0 - 0.5 * phi, t], -1)
    D = np.zeros(t.shape + (2, 2))
    D[..., 0, 0] = D[..., 1, 1] = 1.0
    D[..., 0, 1] = -dphi
    grid = DiffeoGrid(q, p, D)
    b, _ = rotate_b(Tensor2Field(sqrt_tensor(grid).data, domain=q), theta)
    out = build_sigma(RepInput(grid, b, theta))
    return out.sigma, phi, dphi


# ------------------------------------------------------------ affine chart

def chart_frame(center=(0.0, -0.75)):
    """Isometry pair (alpha, beta) sending R_pi to the plane {x3 = 0} and
    I_center to the chart origin."""
    from .hyperbolic_plane import involution_at, inv2, translation_to
    Ti = inv2(translation_to(strip_to_z(*center)))
    return involution_at(1j) @ Ti, Ti


def to_chart(sigma, frame):
    from .ads_core import isom_action, to_affine
    return to_affine(isom_action(frame[0], frame[1], sigma))


class ProfileInterpolant:
    """Hermite interpolants of phi and phi' on [t_lo, t_hi]."""

    def __init__(self, theta, t_lo, t_hi, n=2001):
        from scipy.interpolate import CubicHermiteSpline
        self.theta = check_theta(theta)
        t = np.linspace(t_lo, t_hi, n)
        dphi, phi = kernels.profile_arrays(t, self.theta)
        d2 = phi_second(dphi, self.theta)
        self.t_lo, self.t_hi = t_lo, t_hi
        self.phi = CubicHermiteSpline(t, phi, dphi)
        self.dphi = CubicHermiteSpline(t, dphi, d2)

    def sigma(self, s, t):
        _, xi, _, _ = rho_xi(self.dphi(t), self.theta)
        return closed_form_sigma(s, t, self.phi(t), xi)


def _invert_chart(fun, targets, guess, t_range, iters=30, step=1e-7):
    """Newton solve fun(p) = targets for p = (s, t), vectorised; failures -> NaN."""
    p = guess.copy()
    for _ in range(iters):
        f0 = fun(p) - targets
        Jm = np.empty(p.shape + (2,))
        for k in range(2):
            dp = np.zeros_like(p)
            dp[..., k] = step
            Jm[..., k] = (fun(p + dp) - fun(p - dp)) / (2 * step)
        det = np.linalg.det(Jm)
        bad = ~(np.abs(det) > 1e-12)
        Jm[bad] = np.eye(2)
        delta = np.linalg.solve(Jm, f0[..., None])[..., 0]
        delta[bad] = 0.0
        p = p - delta
        p[bad] = np.nan
        p[..., 1] = np.clip(p[..., 1], *t_range)
        if np.nanmax(np.abs(delta)) < 1e-13:
            break
    return p


def chart_graph(theta, x, y, s_window, t_window, frame=None, coarse=41):
    """Barrier surface as a graph t = u(x, y) in the affine chart.

    Returns the ChartFunction (NaN outside the image of the window) and the
    (s, t) preimage of every chart node."""
    from scipy.interpolate import griddata
    from .surface_calculus import ChartFunction
    frame = frame or chart_frame()
    s0, s1 = s_window
    t0, t1 = t_window
    pad = 0.05 * (t1 - t0)
    interp = ProfileInterpolant(theta, t0 - pad, min(t1 + pad, -1e-6))
    sc = np.linspace(s0, s1, coarse)
    tc = np.linspace(t0, t1, coarse)
    S, T = np.meshgrid(sc, tc, indexing="ij")
    P = to_chart(interp.sigma(S, T), frame)
    X, Y = np.meshgrid(x, y, indexing="ij")
    tgt = np.stack([X, Y], -1)
    pts = P[..., :2].reshape(-1, 2)
    gs = griddata(pts, S.ravel(), (X, Y), method="linear")
    gt = griddata(pts, T.ravel(), (X, Y), method="linear")
    inside = np.isfinite(gs) & np.isfinite(gt)
    guess = np.stack([np.where(inside, gs, 0.5 * (s0 + s1)), np.where(inside, gt, 0.5 * (t0 + t1))], -1)

    def fun(p):
        tt = np.clip(p[..., 1], interp.t_lo, interp.t_hi)
        return to_chart(interp.sigma(p[..., 0], tt), frame)[..., :2]

    st = np.full(guess.shape, np.nan)
    # exploratory Newton steps and far-away guesses may leave the chart
    with np.errstate(all="ignore"):
        st[inside] = _invert_chart(fun, tgt[inside], guess[inside], (interp.t_lo, interp.t_hi))
        inside &= np.isfinite(st).all(axis=-1)
        st = np.where(inside[..., None], st, guess)
        inside &= (st[..., 0] >= s0) & (st[..., 0] <= s1) & (st[..., 1] >= t0) & (st[..., 1] <= t1)
        inside &= np.abs(fun(st) - tgt).max(axis=-1) < 1e-10
        tt = np.clip(st[..., 1], interp.t_lo, interp.t_hi)
        u = to_chart(interp.sigma(st[..., 0], tt), frame)[..., 2]
    u = np.where(inside, u, np.nan)
    return ChartFunction(x, y, u), st
