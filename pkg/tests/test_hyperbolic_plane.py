import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adsksurf import hyperbolic_plane as hp
from adsksurf.hyperbolic_plane import HPoint, HVector, Isom2

from conftest import random_sl2

coord = st.floats(-3, 3)
tcoord = st.floats(-1.5, 1.5)
angle = st.floats(-math.pi, math.pi)


# ------------------------------------------------------------ charts

def test_strip_examples():
    assert HPoint.strip(0, 0).to(hp.UHP).coords == pytest.approx((0.0, 1.0))
    assert HPoint.uhp(0, math.e).to(hp.STRIP).coords == pytest.approx((1.0, 0.0), abs=1e-15)
    x, y = HPoint.strip(0, -math.pi / 4).to(hp.UHP).coords
    z = 1j * cmath.exp(-1j * math.pi / 4)
    assert (x, y) == pytest.approx((z.real, z.imag), abs=1e-15)
    assert (x, y) == pytest.approx((math.sqrt(2) / 2, math.sqrt(2) / 2))


@given(coord, tcoord)
def test_chart_roundtrips(s, t):
    p = HPoint.strip(s, t)
    back = p.to(hp.UHP).to(hp.STRIP)
    assert back.coords == pytest.approx((s, t), abs=1e-10)
    X = p.to(hp.HYPERBOLOID)
    assert X.coords[0] ** 2 + X.coords[1] ** 2 - X.coords[2] ** 2 == pytest.approx(-1.0, abs=1e-9)
    assert X.to(hp.STRIP).coords == pytest.approx((s, t), abs=1e-9)


def test_chart_validation():
    with pytest.raises(ValueError):
        HPoint.uhp(0.0, -1.0)
    with pytest.raises(ValueError):
        HPoint.strip(0.0, 2.0)
    with pytest.raises(ValueError):
        HPoint("disk", (0.0, 0.0))
    with pytest.raises(ValueError):
        HPoint(hp.HYPERBOLOID, (0.0, 0.0, 2.0))


def test_metric_examples():
    p = HPoint.strip(0, 0)
    assert hp.metric(HVector(p, (1, 0)), HVector(p, (1, 0))) == pytest.approx(1.0)
    q = HPoint.strip(0, -math.pi / 4)
    assert hp.metric(HVector(q, (1, 0)), HVector(q, (1, 0))) == pytest.approx(2.0)
    r = HPoint.uhp(0, 1)
    assert hp.metric(HVector(r, (1, 0)), HVector(r, (1, 0))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        hp.metric(HVector(p, (1, 0)), HVector(q, (1, 0)))


@given(coord, tcoord, angle, st.floats(0.1, 3))
def test_vector_chart_changes_preserve_length(s, t, a, r):
    v = HVector(HPoint.strip(s, t), (r * math.cos(a), r * math.sin(a)))
    n = hp.norm(v)
    for chart in hp.CHARTS:
        assert hp.norm(v.to(chart)) == pytest.approx(n, rel=1e-8)


def test_distance_matches_strip_geodesic():
    # along t = 0 the strip metric is ds^2, so d((0,0),(a,0)) = a
    assert hp.distance(HPoint.strip(0, 0), HPoint.strip(1.7, 0)) == pytest.approx(1.7)


def test_christoffel_examples():
    assert np.all(hp.christoffel_strip(0.0) == 0)
    G = hp.christoffel_strip(-math.pi / 4)
    # nabla_{d_s} d_s = -tan(t) d_t = d_t at t = -pi/4
    assert G[:, 0, 0] == pytest.approx([0.0, 1.0])


def test_christoffel_against_metric_derivatives():
    # Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij) with g = E / cos^2 t
    t, h = -0.6, 1e-5
    lam = lambda tt: 1.0 / math.cos(tt) ** 2
    dl = (lam(t + h) - lam(t - h)) / (2 * h)
    dg = np.zeros((2, 2, 2))  # dg[l, i, j] = d_l g_ij
    dg[1] = dl * np.eye(2)
    ref = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                ref[k, i, j] = 0.5 / lam(t) * (dg[i, j, k] + dg[j, i, k] - dg[k, i, j])
    assert hp.christoffel_strip(t) == pytest.approx(ref, abs=1e-8)


def test_parallel_transport_fd():
    # transport e along t = t0 with the Christoffels; the equidistant curve at
    # distance d has geodesic curvature tanh d = sin|t0| per arclength ds / cos t0
    t0, L, n = -0.4, 1.0, 2000
    G = hp.christoffel_strip(t0)
    v = np.array([1.0, 0.0])
    h = L / n
    for _ in range(n):
        k1 = -G[:, 0, :] @ v
        k2 = -G[:, 0, :] @ (v + 0.5 * h * k1)
        v = v + h * k2
    ang = math.atan2(v[1], v[0])
    assert ang == pytest.approx(math.tan(t0) * L, abs=1e-6)


# ------------------------------------------------------------ isometries

def test_translation_example():
    a = 0.7
    D = np.diag([math.exp(a / 2), math.exp(-a / 2)])
    g = Isom2(D)
    p = HPoint.strip(0.3, -0.5)
    assert g.apply(p).coords == pytest.approx((1.0, -0.5))
    assert D == pytest.approx(hp.hyperbolic_translation(a))


def test_elliptic_fixed_point_examples():
    R = hp.rotation_about(1j, 0.8)
    assert elliptic(R) == pytest.approx(1j)
    D = np.diag([math.exp(0.5), math.exp(-0.5)])
    C = D @ R @ np.linalg.inv(D)
    assert elliptic(C) == pytest.approx(math.e * 1j)
    assert complex(hp.mobius(C, math.e * 1j)) == pytest.approx(math.e * 1j)
    assert elliptic(np.array([[0.0, 1.0], [-1.0, 0.0]])) == pytest.approx(1j)
    with pytest.raises(ValueError):
        hp.elliptic_fixed_points(D)


def elliptic(M):
    return complex(hp.elliptic_fixed_point(Isom2(M)).z)


def test_frames_examples():
    i = HPoint.uhp(0, 1)
    dx = HVector(i, (1, 0))
    assert hp.isom_from_frames(i, dx, i, dx).is_close(Isom2(np.eye(2)))
    g = hp.isom_from_frames(i, dx, i, HVector(i, (-1, 0)))
    assert g.is_close(Isom2(np.array([[0.0, 1.0], [-1.0, 0.0]])))
    q = HPoint.uhp(0, math.e)
    g = hp.isom_from_frames(i, dx, q, HVector(q, (math.e, 0)))
    assert g.is_close(Isom2(np.diag([math.exp(0.5), math.exp(-0.5)])))
    with pytest.raises(ValueError):
        hp.isom_from_frames(i, HVector(i, (2, 0)), q, HVector(q, (math.e, 0)))
    with pytest.raises(ValueError):
        hp.isom_from_frames(i, HVector(q, (math.e, 0)), q, HVector(q, (math.e, 0)))


@given(coord, tcoord, angle, coord, tcoord, angle)
@settings(max_examples=60)
def test_frames_to_isometry_property(s1, t1, a1, s2, t2, a2):
    p, q = HPoint.strip(s1, t1), HPoint.strip(s2, t2)
    lam1, lam2 = math.cos(t1), math.cos(t2)
    v = HVector(p, (lam1 * math.cos(a1), lam1 * math.sin(a1)))
    u = HVector(q, (lam2 * math.cos(a2), lam2 * math.sin(a2)))
    g = hp.isom_from_frames(p, v, q, u)
    assert g.apply(p).coords == pytest.approx(q.coords, abs=1e-8)
    assert g.differential(v).comps == pytest.approx(u.comps, abs=1e-8)


@given(st.integers(0, 2 ** 31))
@settings(max_examples=40)
def test_isometries_preserve_distance(seed):
    rng = np.random.default_rng(seed)
    g = Isom2(random_sl2(rng))
    p = HPoint.strip(*rng.uniform(-1, 1, 2))
    q = HPoint.strip(*rng.uniform(-1, 1, 2))
    assert hp.distance(g.apply(p), g.apply(q)) == pytest.approx(hp.distance(p, q), rel=1e-9, abs=1e-12)
    assert (g @ g.inverse()).is_close(Isom2(np.eye(2)), 1e-9)


def test_rotation_is_counterclockwise():
    z = 0.3 + 1.2j
    R = hp.rotation_about(z, 0.4)
    assert complex(hp.mobius(R, z)) == pytest.approx(z)
    assert cmath.phase(complex(hp.mobius_derivative(R, z))) == pytest.approx(0.4)
    m = hp.rotation_generator(z)
    h = 1e-6
    # unit-speed generator: tau -> R(2 tau) has period pi
    fd = (hp.rotation_about(z, 2 * h) - hp.rotation_about(z, -2 * h)) / (2 * h)
    assert fd == pytest.approx(m, abs=1e-8)
    assert hp.canonical_sign(hp.involution_at(z)) == pytest.approx(hp.canonical_sign(hp.rotation_about(z, math.pi)))


def test_canonical_sign_and_normalize():
    M = np.array([[-2.0, 1.0], [0.0, -0.5]])
    assert hp.canonical_sign(M)[0, 0] > 0
    assert np.linalg.det(hp.normalize_det(3 * np.eye(2))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        hp.normalize_det(np.diag([1.0, -1.0]))


def test_strip_differential_matches_fd():
    rng = np.random.default_rng(3)
    M = random_sl2(rng, 1.0)
    s, t, h = 0.2, -0.5, 1e-6
    D = hp.strip_differential(M, s, t)
    f = lambda a, b: np.array(hp.mobius_strip(M, a, b))
    fd = np.column_stack([(f(s + h, t) - f(s - h, t)) / (2 * h), (f(s, t + h) - f(s, t - h)) / (2 * h)])
    assert D == pytest.approx(fd, abs=1e-7)


# ------------------------------------------------------------ boundary and cross ratio

def test_cross_ratio_examples():
    assert hp.cross_ratio(-1.0, 0.0, 1.0, hp.INFINITY) == -1.0
    assert hp.cross_ratio(-2.0, 0.0, 1.0, hp.INFINITY) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        hp.cross_ratio(0.0, 0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        hp.cross_ratio(hp.INFINITY, 0.0, 1.0, -math.inf)


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4, unique=True), st.integers(0, 2 ** 31))
def test_cross_ratio_moebius_invariant(pts, seed):
    pts = sorted(pts)
    if min(np.diff(pts)) < 1e-2:
        return
    M = random_sl2(np.random.default_rng(seed))
    img = [hp.apply_boundary(M, p) for p in pts]
    cr = hp.cross_ratio(*pts)
    assert hp.cross_ratio(*img) == pytest.approx(cr, rel=1e-8)


def test_cross_ratio_limits_at_infinity():
    # replacing a point by a huge value approaches the infinite limit
    big = 1e9
    for k in range(4):
        pts = [-1.0, 0.5, 2.0, 3.0]
        pts[k] = hp.INFINITY
        lim = hp.cross_ratio(*pts)
        pts[k] = big if k in (2, 3) else -big
        # keep cyclic order: infinity sits between its neighbours
        assert hp.cross_ratio(*pts) == pytest.approx(lim, rel=1e-6)


def test_apply_boundary_infinity():
    M = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert hp.apply_boundary(M, hp.INFINITY) == 2.0
    assert hp.apply_boundary(M, -1.0) == hp.INFINITY
    assert hp.apply_boundary(np.eye(2), hp.INFINITY) == hp.INFINITY
