"""Anti-de Sitter 3-space as SL(2,R) (mod sign) and the SO(2,1) picture.

The ambient form on 2x2 matrices is b(X, Y) = -1/2 tr(adj(X) Y), the
polarisation of -det.  In the coordinates

    x1 = (a - d)/2,  x2 = (b + c)/2,  x3 = (c - b)/2,  x4 = (a + d)/2

it reads x1^2 + x2^2 - x3^2 - x4^2, and the affine chart is
(x1/x4, x2/x4, x3/x4).

Time orientation: the future cone at the identity contains the unit
generator m_i = [[0, 1], [-1, 0]] of counter-clockwise rotations about i;
it is transported to other points by left (equivalently right) translation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hyperbolic_plane import (canonical_sign, elliptic_fixed_points, frames_to_isometry,
                               inv2, mobius, rotation_about, rotation_generator)

ETA4 = np.array([1.0, 1.0, -1.0, -1.0])
ETA3 = np.array([1.0, 1.0, -1.0])
FUTURE_ID = np.array([[0.0, 1.0], [-1.0, 0.0]])
# tangent basis of the totally geodesic plane {I_x} at I_i = m_i (d_x, d_y at i)
_PLANE_E1 = np.array([[-1.0, 0.0], [0.0, 1.0]])
_PLANE_E2 = np.array([[0.0, 1.0], [1.0, 0.0]])


# ------------------------------------------------------------ bilinear form

def inner(X, Y):
    X = np.asarray(X)
    Y = np.asarray(Y)
    return -0.5 * (X[..., 1, 1] * Y[..., 0, 0] + X[..., 0, 0] * Y[..., 1, 1]
                   - X[..., 0, 1] * Y[..., 1, 0] - X[..., 1, 0] * Y[..., 0, 1])


def quadric(X):
    return inner(X, X)


def to_r22(M):
    M = np.asarray(M, dtype=float)
    a, b, c, d = M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
    return np.stack([(a - d) / 2, (b + c) / 2, (c - b) / 2, (a + d) / 2], axis=-1)


def from_r22(x):
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[:-1] + (2, 2))
    out[..., 0, 0] = x[..., 3] + x[..., 0]
    out[..., 0, 1] = x[..., 1] - x[..., 2]
    out[..., 1, 0] = x[..., 1] + x[..., 2]
    out[..., 1, 1] = x[..., 3] - x[..., 0]
    return out


def is_point(M, tol=1e-10):
    return bool(np.all(np.abs(np.linalg.det(M) - 1.0) < tol))


def is_tangent(base, v, tol=1e-10):
    return bool(np.all(np.abs(inner(base, v)) < tol * (1 + np.abs(v).max())))


def ads_metric(base, v, w):
    """Bi-invariant metric: left-translate to the identity, take 1/2 tr."""
    bi = inv2(base)
    a = bi @ v
    b = bi @ w
    return 0.5 * np.trace(a @ b, axis1=-2, axis2=-1)


@dataclass(frozen=True, eq=False)
class AdSPoint:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float).reshape(2, 2)
        if abs(np.linalg.det(M) - 1.0) > 1e-10:
            raise ValueError("AdS point needs det = 1")
        object.__setattr__(self, "matrix", canonical_sign(M))


@dataclass(frozen=True, eq=False)
class AdSTangent:
    base: AdSPoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.array(self.vec, dtype=float).reshape(2, 2)
        if not is_tangent(self.base.matrix, v):
            raise ValueError("vector is not tangent at its base point")
        object.__setattr__(self, "vec", v)

    def norm2(self) -> float:
        return float(ads_metric(self.base.matrix, self.vec, self.vec))


def exp_sl2(A):
    """exp of traceless 2x2 matrices via A^2 = -det(A) I."""
    A = np.asarray(A, dtype=float)
    tr = A[..., 0, 0] + A[..., 1, 1]
    if np.any(np.abs(tr) > 1e-10 * (1 + np.abs(A).max())):
        raise ValueError("exp_sl2 expects a traceless matrix")
    delta = -(A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0])
    r = np.sqrt(np.abs(delta))
    small = np.abs(delta) < 1e-8
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(delta > 0, np.cosh(r), np.cos(r))
        s = np.where(delta > 0, np.sinh(r), np.sin(r)) / np.where(r > 0, r, 1.0)
    c = np.where(small, 1 + delta / 2 + delta ** 2 / 24, c)
    s = np.where(small, 1 + delta / 6 + delta ** 2 / 120, s)
    eye = np.broadcast_to(np.eye(2), A.shape)
    return c[..., None, None] * eye + s[..., None, None] * A


def geodesic(base, direction, tau):
    """Geodesic from ``base`` with unit initial velocity ``direction``."""
    q = ads_metric(base, direction, direction)
    if np.any(np.abs(np.abs(q) - 1.0) > 1e-8):
        raise ValueError("direction must be a unit vector")
    A = inv2(base) @ direction
    return base @ exp_sl2(np.asarray(tau)[..., None, None] * A)


def future_at(P):
    """A future timelike vector at P."""
    return np.asarray(P) @ FUTURE_ID


def is_future(P, v):
    return inner(v, future_at(P)) < 0


# ------------------------------------------------------------ planes

@dataclass(frozen=True, eq=False)
class Plane:
    """Totally geodesic spacelike plane through ``point`` spanned by ``tangents``."""
    point: np.ndarray
    tangents: np.ndarray  # (2, 2, 2)


def normal_vector(P, T1, T2, orient_future=True):
    """Unit timelike vector at P orthogonal to T1, T2 (vectorised)."""
    A = np.stack([to_r22(P), to_r22(T1), to_r22(T2)], axis=-2)
    cof = np.empty(A.shape[:-2] + (4,))
    for i in range(4):
        minor = np.delete(A, i, axis=-1)
        cof[..., i] = (-1) ** (3 + i) * np.linalg.det(minor)
    n = from_r22(cof * ETA4)
    q = quadric(n)
    if np.any(q >= 0):
        raise ValueError("tangent plane is not spacelike")
    n = n / np.sqrt(-q)[..., None, None]
    if orient_future:
        sgn = np.where(inner(n, future_at(P)) < 0, 1.0, -1.0)
        n = n * sgn[..., None, None]
    return n


def dual_plane(gamma) -> Plane:
    gamma = np.asarray(gamma, dtype=float)
    return Plane(gamma @ FUTURE_ID, np.stack([gamma @ _PLANE_E1, gamma @ _PLANE_E2]))


def dual_point(plane: Plane):
    T = plane.tangents
    g = np.array([[inner(T[i], T[j]) for j in range(2)] for i in range(2)])
    if np.linalg.eigvalsh(g).min() <= 0:
        raise ValueError("plane is not spacelike")
    return canonical_sign(normal_vector(plane.point, T[0], T[1]))


# ------------------------------------------------------------ timelike lines

@dataclass(frozen=True)
class TimelikeLine:
    """L_{x, x'} = {gamma : gamma(x') = x}; points are complex uhp coordinates."""
    left: complex
    right: complex


def point_on_line(L: TimelikeLine, tau):
    """Unit-speed parametrisation (period pi) starting at the frame-preserving element."""
    base = frames_to_isometry(L.right, 0.0, L.left, 0.0)
    return rotation_about(L.left, 2 * np.asarray(tau)) @ base


def line_of(eta1, eta2):
    """Left and right points of the timelike geodesic through eta1 and eta2."""
    xr = elliptic_fixed_points(inv2(eta2) @ eta1)
    xl = mobius(eta1, xr)
    return xl, xr


def line_generator(x):
    """Unit future tangent of L_{x, .} at gamma is m_x gamma."""
    return rotation_generator(x)


# ------------------------------------------------------------ affine chart

def to_affine(gamma, frame=None, tol=1e-12):
    M = np.asarray(gamma, dtype=float)
    if frame is not None:
        M = np.asarray(frame) @ M
    x = to_r22(M)
    if np.any(np.abs(x[..., 3]) < tol):
        raise ValueError("point lies at infinity of the affine chart")
    return x[..., :3] / x[..., 3:4]


def from_affine(p, frame=None):
    p = np.asarray(p, dtype=float)
    w = 1.0 + p[..., 2] ** 2 - p[..., 0] ** 2 - p[..., 1] ** 2
    if np.any(w <= 0):
        raise ValueError("affine point lies outside AdS")
    x4 = 1.0 / np.sqrt(w)
    X = np.concatenate([p * x4[..., None], x4[..., None]], axis=-1)
    M = from_r22(X)
    if frame is not None:
        M = inv2(np.asarray(frame)) @ M
    return M


def isom_action(alpha, beta, gamma):
    """(alpha, beta) . gamma = alpha gamma beta^-1 (also for tangent vectors)."""
    return np.asarray(alpha) @ np.asarray(gamma) @ inv2(beta)


# ------------------------------------------------------------ SO(2,1) side

def mink_inner(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]


def cross(x, y):
    """x ⊠ y, characterised by <x ⊠ y, z> = det[x, y, z]."""
    c = np.cross(x, y)
    return c * ETA3


def lambda_map(x):
    """Lambda(x) = x ⊠ (.) as a 3x3 matrix."""
    x = np.asarray(x, dtype=float)
    L = np.zeros(x.shape[:-1] + (3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        L[..., :, j] = cross(x, np.broadcast_to(e, x.shape))
    return L


def lambda_inverse(A):
    A = np.asarray(A, dtype=float)
    x = np.empty(A.shape[:-2] + (3,))
    # Lambda(x) e1 = (0, x3, x2), Lambda(x) e2 = (-x3, 0, -x1)
    x[..., 0] = -A[..., 2, 1]
    x[..., 1] = A[..., 2, 0]
    x[..., 2] = -A[..., 0, 1]
    return x


def so_metric(A, B):
    """Bi-invariant metric on so(2,1) matching the AdS metric: tr(AB)/8."""
    return np.trace(np.asarray(A) @ np.asarray(B), axis1=-2, axis2=-1) / 8.0


def bracket(A, B):
    return A @ B - B @ A


def to_sl2(x):
    """psi: R^{2,1} -> sl(2,R) with 1/2 tr(psi(x) psi(y)) = <x, y> and
    psi(point of H^2 over z) = m_z.  Lambda(x) corresponds to psi(x)/2."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[:-1] + (2, 2))
    out[..., 0, 0] = x[..., 1]
    out[..., 0, 1] = x[..., 0] + x[..., 2]
    out[..., 1, 0] = x[..., 0] - x[..., 2]
    out[..., 1, 1] = -x[..., 1]
    return out


def from_sl2(m):
    m = np.asarray(m, dtype=float)
    return np.stack([(m[..., 0, 1] + m[..., 1, 0]) / 2,
                     (m[..., 0, 0] - m[..., 1, 1]) / 2,
                     (m[..., 0, 1] - m[..., 1, 0]) / 2], axis=-1)


def adjoint_so21(g):
    """SL(2,R) -> SO_0(2,1) compatible with the hyperboloid chart."""
    g = np.asarray(g, dtype=float)
    gi = inv2(g)
    cols = [from_sl2(g @ to_sl2(e) @ gi) for e in np.eye(3)]
    return np.stack(cols, axis=-1)
