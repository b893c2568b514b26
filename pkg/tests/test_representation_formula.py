import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adsksurf import ads_core as ads
from adsksurf import representation_formula as rf
from adsksurf.hyperbolic_plane import canonical_sign, involution_at, strip_to_z
from adsksurf.landslide_tensors import DiffeoGrid, Tensor2Field
from adsksurf.representation_formula import RepInput
from adsksurf.suites import scattered
from adsksurf.surface_calculus import extrinsic, interior, projections

from conftest import THETAS, barrier_case, random_sl2


def identity_input(b_matrix, n=21):
    s = np.linspace(-0.3, 0.3, n)
    t = np.linspace(-0.7, -0.3, n)
    grid = DiffeoGrid.from_map(lambda S, T: (S, T), s, t)
    b = Tensor2Field(np.tile(b_matrix, (n, n, 1, 1)), s, t)
    return RepInput(grid, b)


# ------------------------------------------------------------ explicit surfaces

def test_b_identity_gives_the_plane_of_involutions():
    inp = identity_input(np.eye(2))
    out = rf.build_sigma(inp)
    S, T = np.meshgrid(inp.phi.s, inp.phi.t, indexing="ij")
    ref = canonical_sign(involution_at(strip_to_z(S, T)))
    assert np.abs(canonical_sign(out.sigma) - ref).max() < 1e-12
    pl, pr = projections(out.patch)
    assert np.abs(pl - strip_to_z(S, T)).max() < 1e-12
    assert np.abs(pr - strip_to_z(S, T)).max() < 1e-12
    assert rf.verify_shape(out, inp) < 1e-6
    assert rf.predicted_shape_operator(inp) == pytest.approx(np.zeros((21, 21, 2, 2)))
    assert out.flags.sum() == 0


def test_b_minus_identity_is_flagged():
    # -b dPhi^-1 = E: sigma is the identity everywhere and the surface degenerates
    inp = identity_input(-np.eye(2), n=5)
    out = rf.build_sigma(inp)
    assert np.all(out.flags) and out.diagnostics["flagged_nodes"] == 25
    with pytest.raises(ValueError):
        extrinsic(out.patch)
    assert np.abs(canonical_sign(out.sigma) - np.eye(2)).max() < 1e-12


def test_input_validation():
    inp = identity_input(np.eye(2), n=5)
    with pytest.raises(ValueError):
        RepInput(inp.phi, Tensor2Field(inp.b.data[:-1]))
    bad = identity_input(2 * np.eye(2), n=5)
    with pytest.raises(ValueError, match="isometry"):
        rf.build_sigma(bad)
    refl = identity_input(np.diag([1.0, -1.0]), n=5)
    with pytest.raises(ValueError):
        rf.build_sigma(refl)


# ------------------------------------------------------------ barrier surfaces

@pytest.mark.parametrize("theta", THETAS)
def test_barrier_surface_defining_properties(theta):
    inp, out = barrier_case(theta)
    assert out.diagnostics["frame_defect"] < 1e-12
    assert out.diagnostics["point_residual"] < 1e-12
    assert out.diagnostics["flagged_nodes"] == 0
    N = out.normals
    assert np.abs(ads.inner(N, out.sigma)).max() < 1e-12
    assert np.abs(ads.inner(N, N) + 1).max() < 1e-12
    assert np.all(ads.is_future(out.sigma, N))
    assert rf.verify_orthogonality(out) < 1e-4
    assert rf.verify_roundtrip(out, inp) < 1e-6


@pytest.mark.parametrize("theta", THETAS)
def test_barrier_fundamental_forms(theta):
    inp, out = barrier_case(theta)
    # the h = 5e-3 window resolves I to 1e-4 at theta = pi/2; the other
    # angles have larger third derivatives
    tol = 1e-4 if theta == math.pi / 2 else 2e-4
    assert rf.verify_first_ff(out, inp) < tol
    assert rf.verify_differential(out, inp) < 1e-3
    assert rf.verify_shape(out, inp) < 1e-3
    ext = extrinsic(out.patch, use_normals=False)
    detB = interior(np.linalg.det(ext.B))
    assert np.abs(detB - math.tan(theta / 2) ** 2).max() < 1e-3
    assert np.abs(interior(ext.K) + 1 + math.tan(theta / 2) ** 2).max() < 1e-3


def test_predicted_shape_operator_algebra():
    # for tr b = 2 cos theta and det b = 1, det B = tan^2(theta/2) exactly
    for theta in THETAS:
        c = math.cos(theta)
        b = np.array([[c + 0.3, -math.sin(theta) - 0.1], [0.0, 0.0]])
        b[1, 1] = 2 * c - b[0, 0]
        b[1, 0] = (b[0, 0] * b[1, 1] - 1) / b[0, 1]
        inp = identity_input(b, n=3)
        B = rf.predicted_shape_operator(inp)[0, 0]
        assert np.linalg.det(B) == pytest.approx(math.tan(theta / 2) ** 2)


def test_first_form_convergence_is_second_order():
    theta = math.pi / 2
    errs = [rf.verify_first_ff(*reversed(barrier_case(theta, h))) for h in (1e-2, 5e-3)]
    assert 3.5 < errs[0] / errs[1] < 4.5


# ------------------------------------------------------------ symmetries

@given(st.integers(0, 2 ** 31))
@settings(max_examples=20, deadline=None)
def test_equivariance(seed):
    rng = np.random.default_rng(seed)
    inp, _ = barrier_case(math.pi / 3)
    sc = scattered(inp)
    a, b = random_sl2(rng), random_sl2(rng)
    assert rf.verify_equivariance(sc, a, b) < 1e-8 * np.abs(a).max() * np.abs(b).max()


@pytest.mark.parametrize("rho0", [0.2, -0.4, 1.0])
def test_parallel_shift(rho0):
    inp, _ = barrier_case(2 * math.pi / 3)
    assert rf.verify_parallel_shift(scattered(inp), rho0) < 1e-8


def test_transform_input_preserves_admissibility():
    rng = np.random.default_rng(2)
    inp, _ = barrier_case(math.pi / 2)
    moved = rf.transform_input(scattered(inp), random_sl2(rng), random_sl2(rng))
    tr = np.trace(moved.b.data, axis1=-2, axis2=-1)
    assert tr == pytest.approx(np.zeros_like(tr), abs=1e-10)
    assert np.linalg.det(moved.b.data) == pytest.approx(np.ones_like(tr))
