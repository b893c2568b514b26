"""sigma_{Phi, b}: the K-surface attached to landslide data (Phi, b).

At each x, sigma(x) is the isometry taking Phi(x) to x whose differential is
-b dPhi^{-1}.  The unit normal of the surface at sigma(x) is the tangent of
the timelike line {gamma : gamma(Phi(x)) = x}, namely m_x sigma(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ads_core as ads
from .hyperbolic_plane import (canonical_sign, frames_to_isometry, inv2, mobius, mobius_strip,
                               rotation_about, rotation_generator, strip_angle_to_uhp,
                               strip_differential, strip_to_hyperboloid_jacobian, strip_to_z)
from .landslide_tensors import DiffeoGrid, Tensor2Field
from .surface_calculus import (SurfacePatch, align_signs, d1, extrinsic, first_form,
                               interior, projection_strip, projections, tangents)

J = np.array([[0.0, -1.0], [1.0, 0.0]])
EYE = np.eye(2)
FRAME_TOL = 1e-8
TRACE_FLAG_TOL = 1e-6


@dataclass
class RepInput:
    phi: DiffeoGrid
    b: Tensor2Field
    theta: float | None = None

    def __post_init__(self):
        if self.b.data.shape != self.phi.dphi.shape:
            raise ValueError("b and dPhi must be sampled on the same nodes")


@dataclass
class RepOutput:
    sigma: np.ndarray
    normals: np.ndarray
    flags: np.ndarray
    patch: SurfacePatch | None = None
    diagnostics: dict = field(default_factory=dict)


def _frame_operator(inp: RepInput):
    """-b dPhi^{-1} rescaled to an orthogonal matrix when (Phi, b) is admissible."""
    x, p = inp.phi.domain, inp.phi.values
    M = -inp.b.data @ np.linalg.inv(inp.phi.dphi)
    scale = np.cos(p[..., 1]) / np.cos(x[..., 1])
    return M, scale[..., None, None] * M


def build_sigma(inp: RepInput, ref_angle=0.0, frame_tol=FRAME_TOL) -> RepOutput:
    x, p = inp.phi.domain, inp.phi.values
    M, Q = _frame_operator(inp)
    defect = np.abs(np.swapaxes(Q, -1, -2) @ Q - EYE).max(axis=(-2, -1))
    # -b dPhi^-1 cancels entries of size |b| |dPhi^-1|; allow for that roundoff
    scale = (np.linalg.norm(inp.b.data, axis=(-2, -1))
             * np.linalg.norm(np.linalg.inv(inp.phi.dphi), axis=(-2, -1))) ** 2
    allowed = np.maximum(frame_tol, 64 * np.finfo(float).eps * scale)
    if np.any(defect > allowed) or np.any(np.linalg.det(Q) <= 0):
        raise ValueError("-b dPhi^-1 is not an orientation-preserving isometry "
                         f"(defect {defect.max():.3e})")
    cp = np.cos(p[..., 1])
    v = np.stack([cp * np.cos(ref_angle), cp * np.sin(ref_angle)], -1)
    u = (M @ v[..., None])[..., 0]
    ang_p = strip_angle_to_uhp(p[..., 0], p[..., 1], ref_angle)
    ang_q = strip_angle_to_uhp(x[..., 0], x[..., 1], np.arctan2(u[..., 1], u[..., 0]))
    zp = strip_to_z(p[..., 0], p[..., 1])
    zq = strip_to_z(x[..., 0], x[..., 1])
    sigma = canonical_sign(frames_to_isometry(zp, ang_p, zq, ang_q))
    patch = None
    if inp.phi.is_grid and sigma.ndim == 4:
        sigma = align_signs(sigma)
    normals = rotation_generator(zq) @ sigma
    if inp.phi.is_grid and sigma.ndim == 4:
        patch = SurfacePatch(inp.phi.s, inp.phi.t, sigma, normals)
    tr = np.trace(inp.b.data, axis1=-2, axis2=-1)
    flags = np.abs(tr + 2) < TRACE_FLAG_TOL
    diag = {
        "frame_defect": float(defect.max()),
        "point_residual": float(np.abs(mobius(sigma, zp) - zq).max()),
        "flagged_nodes": int(flags.sum()),
    }
    return RepOutput(sigma, normals, flags, patch, diag)


# ------------------------------------------------------------ checks

def predicted_first_form(inp: RepInput):
    """I = 1/4 g((E + b) ., (E + b) .)."""
    Eb = EYE + inp.b.data
    lam = 1.0 / np.cos(inp.phi.domain[..., 1]) ** 2
    return 0.25 * lam[..., None, None] * (np.swapaxes(Eb, -1, -2) @ Eb)


def predicted_shape_operator(inp: RepInput):
    """B = -J_I (E + b)^-1 (E - b), i.e. -(E + b)^-1 J (E - b)."""
    b = inp.b.data
    return -np.linalg.solve(EYE + b, J @ (EYE - b))


def verify_first_ff(out: RepOutput, inp: RepInput) -> float:
    su, sv = tangents(out.patch)
    I = first_form(su, sv)
    return float(np.max(np.abs(interior(I - predicted_first_form(inp)))))


def verify_differential(out: RepOutput, inp: RepInput) -> float:
    """FD d sigma(d_i) sigma^-1 against psi(J (E + b) d_i) / 2 in sl(2,R)."""
    su, sv = tangents(out.patch)
    x = inp.phi.domain
    jac = strip_to_hyperboloid_jacobian(x[..., 0], x[..., 1])  # (..., 3, 2)
    W = J @ (EYE + inp.b.data)
    err = 0.0
    si = inv2(out.sigma)
    for k, dk in enumerate((su, sv)):
        vec = (jac @ W[..., :, k][..., None])[..., 0]
        pred = 0.5 * ads.to_sl2(vec)
        err = max(err, float(np.max(np.abs(interior(dk @ si - pred)))))
    return err


def verify_shape(out: RepOutput, inp: RepInput) -> float:
    ext = extrinsic(out.patch, use_normals=False)
    return float(np.max(np.abs(interior(ext.B - predicted_shape_operator(inp)))))


def verify_orthogonality(out: RepOutput) -> float:
    """Largest |cos| of the angle between d sigma(d_i) and the line tangent."""
    su, sv = tangents(out.patch)
    N = out.normals
    r = [np.abs(ads.inner(d, N)) / np.sqrt(ads.inner(d, d)) for d in (su, sv)]
    return float(max(np.max(interior(a)) for a in r))


def verify_roundtrip(out: RepOutput, inp: RepInput) -> float:
    """max |pi_l - x|, |pi_r - Phi(x)| in strip coordinates."""
    pl, pr = projections(out.patch)
    el = np.abs(projection_strip(pl) - inp.phi.domain).max()
    er = np.abs(projection_strip(pr) - inp.phi.values).max()
    return float(max(el, er))


def transform_input(inp: RepInput, alpha, beta) -> RepInput:
    """Data for alpha Phi beta^-1 with b' = dbeta b dbeta^-1 (scattered nodes)."""
    x, p = inp.phi.domain, inp.phi.values
    y = np.stack(mobius_strip(beta, x[..., 0], x[..., 1]), -1)
    q = np.stack(mobius_strip(alpha, p[..., 0], p[..., 1]), -1)
    db = strip_differential(beta, x[..., 0], x[..., 1])
    da = strip_differential(alpha, p[..., 0], p[..., 1])
    dphi = da @ inp.phi.dphi @ np.linalg.inv(db)
    b = db @ inp.b.data @ np.linalg.inv(db)
    return RepInput(DiffeoGrid(y, q, dphi), Tensor2Field(b, domain=y), inp.theta)


def verify_equivariance(inp: RepInput, alpha, beta, out: RepOutput | None = None) -> float:
    """sigma'(beta x) = beta sigma(x) alpha^-1, compared modulo sign."""
    out = out or build_sigma(inp)
    new = build_sigma(transform_input(inp, alpha, beta))
    pred = canonical_sign(np.asarray(beta) @ out.sigma @ inv2(alpha))
    return float(np.abs(canonical_sign(new.sigma) - pred).max())


def verify_parallel_shift(inp: RepInput, rho0, out: RepOutput | None = None) -> float:
    """sigma_{Phi, R_{2 rho0} b} against the time-rho0 normal push of sigma_{Phi, b}."""
    out = out or build_sigma(inp)
    R = np.cos(2 * rho0) * EYE + np.sin(2 * rho0) * J
    shifted = RepInput(inp.phi, Tensor2Field(R @ inp.b.data, inp.b.s, inp.b.t, inp.b.domain))
    new = build_sigma(shifted)
    pushed = np.cos(rho0) * out.sigma + np.sin(rho0) * out.normals
    zq = strip_to_z(inp.phi.domain[..., 0], inp.phi.domain[..., 1])
    alt = rotation_about(zq, 2 * rho0) @ out.sigma
    res_alt = float(np.abs(canonical_sign(pushed) - canonical_sign(alt)).max())
    return max(float(np.abs(canonical_sign(new.sigma) - canonical_sign(pushed)).max()), res_alt)
