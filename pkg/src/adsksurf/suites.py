"""Invariant suites run by ``adsksurf verify`` and by the acceptance tests.

Every suite returns ``{"pass", "max_residual", "tolerance"}`` plus optional
extra entries.  All randomness comes from a seeded numpy Generator.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import ads_core as ads
from .barrier_family import (barrier_grid, chart_graph, limit_slope, ode_residual,
                             profile_values, rho_xi, sigma_limit, sigma_trajectory,
                             tabulate_profile)
from .hyperbolic_plane import (INFINITY, canonical_sign, cross_ratio, hyperbolic_translation,
                               involution_at, rotation_about, strip_to_z)
from .landslide_tensors import (DiffeoGrid, PiecewiseMobius, Tensor2Field, classify,
                                max_codazzi, mobius_map, qs_norm_estimate, rotate_b,
                                sqrt_tensor)
from .representation_formula import (RepInput, build_sigma, verify_differential,
                                     verify_equivariance, verify_first_ff,
                                     verify_orthogonality, verify_parallel_shift,
                                     verify_roundtrip, verify_shape)
from .surface_calculus import (extrinsic, gauss_defect, graph_curvature, interior,
                               normal_evolution, pullback_check)

log = logging.getLogger("adsksurf")

TOLERANCES = {
    "lambda": 1e-10,
    "plane_duality": 1e-10,
    "cross_ratio": 1e-10,
    "sigma_identity": 1e-12,
    "slope_limit": 1e-2,
    "xi_limit": 1e-3,
    "rho_limit": 1e-4,
    "ode": 1e-8,
    "defining": 1e-8,
    "first_ff": 1e-4,
    "differential": 1e-3,
    "shape": 1e-4,
    "det_b": 1e-4,
    "orthogonality": 1e-4,
    "roundtrip": 1e-6,
    "pullback": 1e-3,
    "gauss": 1e-3,
    "codazzi": 1e-3,
    "landslide_theta": 1e-3,
    "equivariance": 1e-8,
    "parallel_shift": 1e-8,
    "dual_curvature": 1e-3,
    "dual_sigma": 1e-8,
    "maximal": 1e-3,
    "monge_ampere": 1e-3,
    "nesting": 0.0,
    "trajectory": 0.05,
    "convergence": 2.0 ** 1.7,
}
FAULTS = ("codazzi",)


@dataclass
class VerifyConfig:
    theta: float = 0.5 * math.pi
    grid_h: float = 5e-3
    s_window: tuple = (-0.25, 0.25)
    t_window: tuple = (-0.88, -0.72)
    seed: int = 0
    samples: int = 1000
    tol: dict = field(default_factory=dict)
    fault: str | None = None

    def tolerance(self, name):
        return float(self.tol.get(name, TOLERANCES[name]))


def result(value, tol, ok=None, **extra):
    value = float(value)
    ok = (value < tol) if ok is None else bool(ok)
    out = {"pass": bool(ok and math.isfinite(value)), "max_residual": value, "tolerance": float(tol)}
    out.update(extra)
    return out


def window_axes(window, h):
    a, b = window
    n = max(int(round((b - a) / h)) + 1, 5)
    return np.linspace(a, b, n)


def random_isometry(rng, size=None, spread=2.0):
    """rotation o translation o rotation with bounded translation length."""
    u = rng.random((3,) if size is None else (size, 3))
    u = np.atleast_2d(u)
    M = rotation_about(1j, 2 * np.pi * u[:, 0]) @ hyperbolic_translation(spread * (2 * u[:, 1] - 1)) \
        @ rotation_about(1j, 2 * np.pi * u[:, 2])
    return M[0] if size is None else M


def so21_inverse(G):
    eta = np.diag(ads.ETA3)
    return eta @ np.swapaxes(G, -1, -2) @ eta


# ------------------------------------------------------------ algebra

def suite_lambda(cfg: VerifyConfig):
    rng = np.random.default_rng(cfg.seed)
    n = cfg.samples
    x = rng.normal(size=(n, 3))
    y = rng.normal(size=(n, 3))
    G = ads.adjoint_so21(random_isometry(rng, n))
    Lx, Ly = ads.lambda_map(x), ads.lambda_map(y)
    r_br = np.abs(ads.bracket(Lx, Ly) - ads.lambda_map(ads.cross(x, y))).max()
    r_q = np.abs(ads.so_metric(Lx, Ly) - 0.25 * ads.mink_inner(x, y)).max()
    gx = (G @ x[..., None])[..., 0]
    lhs = ads.lambda_map(gx)
    r_eq = (np.abs(lhs - G @ Lx @ so21_inverse(G)).max(axis=(-2, -1))
            / (1 + np.abs(lhs).max(axis=(-2, -1)))).max()
    return result(max(r_br, r_q, r_eq), cfg.tolerance("lambda"),
                  bracket=float(r_br), quarter=float(r_q), equivariance=float(r_eq))


def suite_plane_duality(cfg: VerifyConfig):
    rng = np.random.default_rng(cfg.seed + 1)
    worst = 0.0
    for _ in range(50):
        g, a, b = (random_isometry(rng) for _ in range(3))
        P = ads.dual_plane(g)
        back = ads.dual_point(P)
        moved = ads.Plane(ads.isom_action(a, b, P.point),
                          np.stack([ads.isom_action(a, b, T) for T in P.tangents]))
        pred = canonical_sign(ads.isom_action(a, b, g))
        worst = max(worst, np.abs(back - canonical_sign(g)).max(),
                    np.abs(ads.dual_point(moved) - pred).max())
    return result(worst, cfg.tolerance("plane_duality"))


def suite_cross_ratio(cfg: VerifyConfig):
    tol = cfg.tolerance("cross_ratio")
    sym = abs(cross_ratio(-1.0, 0.0, 1.0, INFINITY) + 1.0)
    rng = np.random.default_rng(cfg.seed + 2)
    inv = 0.0
    for _ in range(100):
        pts = np.cumsum(0.5 + rng.random(4)) - 2.0
        f = mobius_map(random_isometry(rng))
        cr = cross_ratio(*pts)
        inv = max(inv, abs(cross_ratio(*[f(p) for p in pts]) - cr) / (1.0 + abs(cr)))
    pw = PiecewiseMobius([0.0, INFINITY], [np.eye(2), np.diag([2.0, 1.0])])
    est = qs_norm_estimate(pw, 512)
    moeb = qs_norm_estimate(mobius_map([[2.0, 1.0], [1.0, 1.0]]), 512)
    r_pw = abs(est - math.log(2.0))
    worst = max(sym, inv, r_pw, moeb)
    return result(worst, tol, sym == 0.0 and worst < tol, symmetric=sym, invariance=inv,
                  piecewise=est, moebius=moeb)


def suite_sigma_identity(cfg: VerifyConfig):
    s = np.linspace(-1.0, 1.0, 32)
    t = np.linspace(-1.2, 1.2, 32)
    grid = DiffeoGrid.from_map(lambda a, b: (a, b), s, t)
    E = np.broadcast_to(np.eye(2), (32, 32, 2, 2)).copy()
    out = build_sigma(RepInput(grid, Tensor2Field(E, s, t)))
    S, T = np.meshgrid(s, t, indexing="ij")
    ref = canonical_sign(involution_at(strip_to_z(S, T)))
    return result(np.abs(canonical_sign(out.sigma) - ref).max(), cfg.tolerance("sigma_identity"))


# ------------------------------------------------------------ barrier profile

def suite_profile(cfg: VerifyConfig, thetas=None):
    thetas = [cfg.theta] if thetas is None else thetas
    slope = xi = rho = ode = 0.0
    for th in thetas:
        dp, _ = profile_values(np.array([-1e-4]), th)
        slope = max(slope, abs(-1e-4 * dp[0] + limit_slope(th)))
        _, _, cx, _ = rho_xi(dp, th)
        xi = max(xi, abs(cx[0] + 1.0))
        dq, _ = profile_values(np.array([-0.5 * math.pi + 1e-6]), th)
        r, _, _, _ = rho_xi(dq, th)
        rho = max(rho, r[0] - th)
        prof = tabulate_profile(th, 64)
        ode = max(ode, float(ode_residual(prof.t, th).max()))
    return {"slope_limit": result(slope, cfg.tolerance("slope_limit")),
            "xi_limit": result(xi, cfg.tolerance("xi_limit")),
            "rho_limit": result(rho, cfg.tolerance("rho_limit")),
            "ode": result(ode, cfg.tolerance("ode"))}


def faulty_barrier_input(theta, s, t, fault=None):
    grid = barrier_grid(theta, s, t)
    if fault == "codazzi":
        # perturb phi' so b0 stops solving the Codazzi equation
        tt = grid.domain[..., 1]
        grid.dphi[..., 0, 1] *= 1.0 + 0.2 * np.sin(3.0 * tt)
    elif fault is not None:
        raise ValueError(f"unknown fault {fault!r}")
    b, _ = rotate_b(sqrt_tensor(grid), theta)
    return RepInput(grid, b, theta)


def barrier_case(theta, h, s_window, t_window, fault=None):
    s = window_axes(s_window, h)
    t = window_axes(t_window, h)
    inp = faulty_barrier_input(theta, s, t, fault)
    return inp, build_sigma(inp)


def suite_representation(cfg: VerifyConfig):
    inp, out = barrier_case(cfg.theta, cfg.grid_h, cfg.s_window, cfg.t_window, cfg.fault)
    patch = out.patch
    ext = extrinsic(patch)
    N, sig = out.normals, out.sigma
    defining = max(out.diagnostics["frame_defect"], out.diagnostics["point_residual"],
                   float(np.abs(ads.inner(N, sig)).max()),
                   float(np.abs(ads.inner(N, N) + 1.0).max()))
    detb = float(np.nanmax(np.abs(interior(np.linalg.det(extrinsic(patch, use_normals=False).B))
                                  - math.tan(0.5 * cfg.theta) ** 2)))
    pull = max(pullback_check(patch, "left", ext), pullback_check(patch, "right", ext))
    cls = classify(inp.phi)
    return {
        "defining": result(defining, cfg.tolerance("defining")),
        "first_ff": result(verify_first_ff(out, inp), cfg.tolerance("first_ff")),
        "differential": result(verify_differential(out, inp), cfg.tolerance("differential")),
        "shape": result(verify_shape(out, inp), cfg.tolerance("shape")),
        "det_b": result(detb, cfg.tolerance("det_b")),
        "orthogonality": result(verify_orthogonality(out), cfg.tolerance("orthogonality")),
        "roundtrip": result(verify_roundtrip(out, inp), cfg.tolerance("roundtrip")),
        "pullback": result(pull, cfg.tolerance("pullback")),
        "gauss": result(gauss_defect(patch, ext), cfg.tolerance("gauss")),
        "codazzi": result(max_codazzi(inp.b, 2), cfg.tolerance("codazzi")),
        "landslide_theta": result(abs(cls.theta - cfg.theta) if cls.is_landslide else math.inf,
                                  cfg.tolerance("landslide_theta"), estimate=cls.theta),
    }


def scattered(inp: RepInput, step=(7, 5)):
    idx = (slice(None, None, step[0]), slice(None, None, step[1]))
    dom = inp.phi.domain[idx]
    grid = DiffeoGrid(dom, inp.phi.values[idx], inp.phi.dphi[idx])
    return RepInput(grid, Tensor2Field(inp.b.data[idx], domain=dom), inp.theta)


def suite_symmetries(cfg: VerifyConfig, pairs=20):
    inp, _ = barrier_case(cfg.theta, cfg.grid_h, cfg.s_window, cfg.t_window)
    sc = scattered(inp)
    out = build_sigma(sc)
    rng = np.random.default_rng(cfg.seed + 3)
    eq = 0.0
    for _ in range(pairs):
        eq = max(eq, verify_equivariance(sc, random_isometry(rng), random_isometry(rng), out))
    ps = max(verify_parallel_shift(sc, r0, out) for r0 in (0.25 * math.pi, 0.5 * math.pi, math.pi))
    return {"equivariance": result(eq, cfg.tolerance("equivariance")),
            "parallel_shift": result(ps, cfg.tolerance("parallel_shift"))}


def suite_duality(cfg: VerifyConfig):
    inp, out = barrier_case(cfg.theta, cfg.grid_h, cfg.s_window, cfg.t_window)
    ext = extrinsic(out.patch)
    K = interior(ext.K)
    dual = normal_evolution(out.patch, 0.5 * math.pi, ext)
    Kd = interior(extrinsic(dual).K)
    r_k = float(np.nanmax(np.abs(Kd + K / (K + 1.0))))
    neg = RepInput(inp.phi, Tensor2Field(-inp.b.data, inp.b.s, inp.b.t, inp.b.domain), inp.theta)
    r_s = float(np.abs(canonical_sign(build_sigma(neg).sigma) - canonical_sign(dual.mats)).max())
    mid = normal_evolution(out.patch, 0.25 * math.pi, ext)
    trB = np.trace(extrinsic(mid).B, axis1=-2, axis2=-1)
    r_m = float(np.nanmax(np.abs(interior(trB))))
    return {"dual_curvature": result(r_k, cfg.tolerance("dual_curvature")),
            "dual_sigma": result(r_s, cfg.tolerance("dual_sigma")),
            "maximal": result(r_m, cfg.tolerance("maximal"))}


# ------------------------------------------------------------ affine chart

CHART_HALF_WIDTH = 0.45
LIE_WINDOW = ((-1.0, 1.0), (-1.2, -0.3))


def chart_axes(h, half=CHART_HALF_WIDTH):
    return window_axes((-half, half), h)


def monge_ampere_residual(theta, h):
    x = chart_axes(h)
    cf, _ = chart_graph(theta, x, x, *LIE_WINDOW)
    detB, _, flags = graph_curvature(cf)
    detB = interior(detB)  # one-sided boundary stencils are not scored
    ok = np.isfinite(detB)
    if not np.any(ok):
        return math.inf, 0
    return float(np.max(np.abs(detB[ok] - math.tan(0.5 * theta) ** 2))), int(ok.sum())


def suite_monge_ampere(cfg: VerifyConfig):
    r, n = monge_ampere_residual(cfg.theta, cfg.grid_h)
    return result(r, cfg.tolerance("monge_ampere"), nodes=n)


def nesting_margins(h=0.02, pairs=((math.pi / 3, math.pi / 2), (math.pi / 2, 2 * math.pi / 3))):
    x = chart_axes(h)
    us = {}
    out = []
    for pair in pairs:
        for th in pair:
            if th not in us:
                us[th] = chart_graph(th, x, x, *LIE_WINDOW)[0].u
        d = us[pair[0]] - us[pair[1]]
        ok = np.isfinite(d)
        out.append(float(np.min(d[ok])) if np.any(ok) else -math.inf)
    return out


def suite_nesting(cfg: VerifyConfig):
    m = nesting_margins()
    # heuristic spot check: the smaller angle lies strictly above
    return result(min(m), 0.0, min(m) > 0, margins=m)


# ------------------------------------------------------------ limits and rates

def trajectory_distances(theta, s0, ts):
    sig, _, _ = sigma_trajectory(theta, s0, ts)
    L = sigma_limit(s0)
    return np.array([min(np.linalg.norm(S - L), np.linalg.norm(S + L)) for S in sig])


def suite_trajectory(cfg: VerifyConfig):
    """sigma -> I_(s0, 0) with the predicted rate |t|^(1 - A/2)."""
    ts = -np.logspace(-2, -5, 4)
    rate = 1.0 - 0.5 * limit_slope(cfg.theta)
    worst = 0.0
    dist = {}
    for s0 in (-1.0, 0.0, 1.0):
        d = trajectory_distances(cfg.theta, s0, ts)
        fit = np.polyfit(np.log(-ts), np.log(d), 1)[0]
        worst = max(worst, abs(fit - rate))
        dist[str(s0)] = d.tolist()
    return result(worst, cfg.tolerance("trajectory"), predicted_rate=rate, distances=dist)


def suite_convergence(cfg: VerifyConfig):
    """first-ff residual at h and h/2; order-2 differences give a ratio near 4."""
    res = []
    for h in (cfg.grid_h, 0.5 * cfg.grid_h):
        inp, out = barrier_case(cfg.theta, h, cfg.s_window, cfg.t_window)
        res.append(verify_first_ff(out, inp))
    ratio = res[0] / res[1]
    tol = cfg.tolerance("convergence")
    return {"pass": bool(ratio >= tol), "max_residual": res[0], "tolerance": tol,
            "ratio": ratio, "residual_half": res[1]}


SUITES = ("lambda", "plane_duality", "cross_ratio", "sigma_identity", "profile",
          "representation", "symmetries", "duality", "monge_ampere", "nesting",
          "trajectory", "convergence")


def run_all(cfg: VerifyConfig, only=None):
    report = {}
    for name in SUITES:
        if only and name not in only:
            continue
        log.info("suite %s", name)
        r = globals()["suite_" + name](cfg)
        if "pass" in r:
            report[name] = r
        else:
            report.update(r)
    return report
