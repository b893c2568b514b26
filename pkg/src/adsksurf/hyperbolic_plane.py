"""The hyperbolic plane in three charts, its isometries and boundary cross-ratios.

Charts
------
``uhp``          z = x + iy, y > 0, metric |dz|^2 / y^2
``strip``        z = i exp(s + it), |t| < pi/2, metric (ds^2 + dt^2) / cos^2 t
``hyperboloid``  X1^2 + X2^2 - X3^2 = -1, X3 > 0 (Cayley identification, so
                 that i maps to (0, 0, 1) and orientation is preserved)

Isometries are PSL(2,R) matrices acting by (az + b)/(cz + d).  Array
functions broadcast over leading axes; matrices have shape (..., 2, 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UHP = "uhp"
STRIP = "strip"
HYPERBOLOID = "hyperboloid"
CHARTS = (UHP, STRIP, HYPERBOLOID)

INFINITY = math.inf


# ---------------------------------------------------------------- charts

def strip_to_uhp(s, t):
    es = np.exp(s)
    return -es * np.sin(t), es * np.cos(t)


def uhp_to_strip(x, y):
    return 0.5 * np.log(x * x + y * y), np.arctan2(-x, y)


def uhp_to_hyperboloid(x, y):
    r2 = x * x + y * y
    return np.stack([(r2 - 1.0) / (2 * y), -x / y, (r2 + 1.0) / (2 * y)], axis=-1)


def hyperboloid_to_uhp(X):
    X = np.asarray(X, dtype=float)
    w = (X[..., 0] + 1j * X[..., 1]) / (1.0 + X[..., 2])
    z = 1j * (1 + w) / (1 - w)
    return z.real, z.imag


def strip_to_hyperboloid(s, t):
    return uhp_to_hyperboloid(*strip_to_uhp(s, t))


def strip_to_z(s, t):
    return 1j * np.exp(np.asarray(s) + 1j * np.asarray(t))


def z_to_strip(z):
    z = np.asarray(z)
    return uhp_to_strip(z.real, z.imag)


def strip_jacobian(s, t):
    """d(x, y)/d(s, t) as real (..., 2, 2) arrays; dz = z dw."""
    z = strip_to_z(s, t)
    return _complex_to_real(z)


def hyperboloid_jacobian(x, y):
    """d(X1, X2, X3)/d(x, y), shape (..., 3, 2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    y2 = y * y
    J = np.empty(x.shape + (3, 2))
    J[..., 0, 0] = x / y
    J[..., 0, 1] = (y2 - x * x + 1.0) / (2 * y2)
    J[..., 1, 0] = -1.0 / y
    J[..., 1, 1] = x / y2
    J[..., 2, 0] = x / y
    J[..., 2, 1] = (y2 - x * x - 1.0) / (2 * y2)
    return J


def strip_to_hyperboloid_jacobian(s, t):
    x, y = strip_to_uhp(s, t)
    return hyperboloid_jacobian(x, y) @ strip_jacobian(s, t)


def conformal_factor(chart, coords):
    """lambda with g = lambda * Euclidean in the given 2D chart."""
    coords = np.asarray(coords, dtype=float)
    if chart == STRIP:
        return 1.0 / np.cos(coords[..., 1]) ** 2
    if chart == UHP:
        return 1.0 / coords[..., 1] ** 2
    raise ValueError("conformal factor only defined for 2D charts")


def _complex_to_real(m):
    m = np.asarray(m)
    out = np.empty(m.shape + (2, 2))
    out[..., 0, 0] = m.real
    out[..., 0, 1] = -m.imag
    out[..., 1, 0] = m.imag
    out[..., 1, 1] = m.real
    return out


# ---------------------------------------------------------------- points

def _check_coords(chart, c):
    if chart not in CHARTS:
        raise ValueError(f"unknown chart {chart!r}")
    if not all(math.isfinite(v) for v in c):
        raise ValueError("non-finite coordinates")
    if chart == UHP:
        if len(c) != 2 or not c[1] > 0:
            raise ValueError("upper half-plane point needs y > 0")
    elif chart == STRIP:
        if len(c) != 2 or not abs(c[1]) < 0.5 * math.pi:
            raise ValueError("strip point needs |t| < pi/2")
    else:
        if len(c) != 3 or not c[2] > 0:
            raise ValueError("hyperboloid point needs X3 > 0")
        q = c[0] ** 2 + c[1] ** 2 - c[2] ** 2
        if abs(q + 1.0) > 1e-9 * max(1.0, c[2] ** 2):
            raise ValueError("point is off the hyperboloid")


@dataclass(frozen=True)
class HPoint:
    chart: str
    coords: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        object.__setattr__(self, "coords", c)
        _check_coords(self.chart, c)

    @classmethod
    def uhp(cls, x, y):
        return cls(UHP, (x, y))

    @classmethod
    def strip(cls, s, t):
        return cls(STRIP, (s, t))

    @classmethod
    def from_z(cls, z):
        return cls(UHP, (z.real, z.imag))

    @property
    def z(self) -> complex:
        if self.chart == UHP:
            return complex(*self.coords)
        if self.chart == STRIP:
            x, y = strip_to_uhp(*self.coords)
            return complex(float(x), float(y))
        x, y = hyperboloid_to_uhp(np.array(self.coords))
        return complex(float(x), float(y))

    def to(self, chart) -> "HPoint":
        if chart == self.chart:
            return self
        z = self.z
        if chart == UHP:
            return HPoint(UHP, (z.real, z.imag))
        if chart == STRIP:
            s, t = uhp_to_strip(z.real, z.imag)
            return HPoint(STRIP, (float(s), float(t)))
        return HPoint(HYPERBOLOID, tuple(uhp_to_hyperboloid(z.real, z.imag).tolist()))


@dataclass(frozen=True)
class HVector:
    """Tangent vector; components are in the chart of ``base``."""
    base: HPoint
    comps: tuple

    def __post_init__(self):
        object.__setattr__(self, "comps", tuple(float(v) for v in self.comps))

    def complex_uhp(self) -> complex:
        """Components in the upper half-plane chart as a complex number."""
        p = self.base
        if p.chart == UHP:
            return complex(*self.comps)
        if p.chart == STRIP:
            return p.z * complex(*self.comps)
        x, y = p.to(UHP).coords
        J = hyperboloid_jacobian(x, y)
        v, *_ = np.linalg.lstsq(J, np.array(self.comps), rcond=None)
        return complex(v[0], v[1])

    def to(self, chart) -> "HVector":
        q = self.base.to(chart)
        dz = self.complex_uhp()
        if chart == UHP:
            return HVector(q, (dz.real, dz.imag))
        if chart == STRIP:
            w = dz / self.base.z
            return HVector(q, (w.real, w.imag))
        x, y = self.base.to(UHP).coords
        return HVector(q, tuple((hyperboloid_jacobian(x, y) @ [dz.real, dz.imag]).tolist()))


def metric(v: HVector, w: HVector) -> float:
    if v.base != w.base:
        raise ValueError("vectors live at different points")
    if v.base.chart == HYPERBOLOID:
        a, b = np.array(v.comps), np.array(w.comps)
        return float(a[0] * b[0] + a[1] * b[1] - a[2] * b[2])
    lam = float(conformal_factor(v.base.chart, v.base.coords))
    return lam * (v.comps[0] * w.comps[0] + v.comps[1] * w.comps[1])


def norm(v: HVector) -> float:
    return math.sqrt(max(metric(v, v), 0.0))


def distance(p: HPoint, q: HPoint) -> float:
    z, w = p.z, q.z
    return math.acosh(1.0 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def christoffel_strip(t):
    """Gamma[k, i, j]: the d_k component of nabla_{d_i} d_j in (s, t)."""
    tn = math.tan(t)
    G = np.zeros((2, 2, 2))
    G[1, 0, 0] = -tn
    G[0, 0, 1] = G[0, 1, 0] = tn
    G[1, 1, 1] = tn
    return G


# ------------------------------------------------------------ matrices

def canonical_sign(M):
    """Fix the PSL sign: first entry (row-major) of size > 1e-12 |M| is positive."""
    M = np.array(M, dtype=float)
    flat = M.reshape(M.shape[:-2] + (4,))
    scale = np.max(np.abs(flat), axis=-1, keepdims=True)
    big = np.abs(flat) > 1e-12 * scale
    idx = np.argmax(big, axis=-1)
    lead = np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]
    sgn = np.where(lead < 0, -1.0, 1.0)
    return M * sgn[..., None, None]


def normalize_det(M):
    M = np.asarray(M, dtype=float)
    d = np.linalg.det(M)
    if np.any(d <= 0):
        raise ValueError("matrix does not define an orientation-preserving isometry")
    return M / np.sqrt(d)[..., None, None]


def mobius(M, z):
    """Action on complex z in the closed upper half-plane (finite points)."""
    M = np.asarray(M)
    return (M[..., 0, 0] * z + M[..., 0, 1]) / (M[..., 1, 0] * z + M[..., 1, 1])


def mobius_derivative(M, z):
    M = np.asarray(M)
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    return det / (M[..., 1, 0] * z + M[..., 1, 1]) ** 2


def translation_to(z):
    """T_z with T_z(i) = z and dT_z(d_x) a positive multiple of d_x."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    r = 1.0 / np.sqrt(y)
    out = np.zeros(z.shape + (2, 2))
    out[..., 0, 0] = y * r
    out[..., 0, 1] = x * r
    out[..., 1, 1] = r
    return out


def rotation_about(z, angle):
    """Counter-clockwise rotation by ``angle`` about z."""
    z = np.asarray(z, dtype=complex)
    angle = np.asarray(angle, dtype=float)
    x, y = z.real, z.imag
    c, s = np.cos(0.5 * angle), np.sin(0.5 * angle)
    shape = np.broadcast(x, c).shape
    out = np.empty(shape + (2, 2))
    out[..., 0, 0] = c - s * x / y
    out[..., 0, 1] = s * (x * x + y * y) / y
    out[..., 1, 0] = -s / y
    out[..., 1, 1] = c + s * x / y
    return out


def rotation_generator(z):
    """Unit generator m_z, with exp(tau m_z) the rotation by 2 tau about z."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    out = np.empty(z.shape + (2, 2))
    out[..., 0, 0] = -x / y
    out[..., 0, 1] = (x * x + y * y) / y
    out[..., 1, 0] = -1.0 / y
    out[..., 1, 1] = x / y
    return out


def involution_at(z):
    """Rotation by pi about z (as a matrix it coincides with m_z)."""
    return rotation_generator(z)


def hyperbolic_translation(a):
    """gamma_a = diag(e^{a/2}, e^{-a/2}); shifts the strip coordinate s by a."""
    a = np.asarray(a, dtype=float)
    out = np.zeros(a.shape + (2, 2))
    out[..., 0, 0] = np.exp(0.5 * a)
    out[..., 1, 1] = np.exp(-0.5 * a)
    return out


def frames_to_isometry(p, ang_p, q, ang_q):
    """Isometry sending p to q and the unit vector at angle ang_p (uhp chart,
    measured from d_x) to the unit vector at angle ang_q."""
    Tp = translation_to(p)
    Tq = translation_to(q)
    R = rotation_about(1j * np.ones_like(np.asarray(p, dtype=complex)),
                       np.asarray(ang_q) - np.asarray(ang_p))
    return Tq @ R @ inv2(Tp)


def inv2(M):
    """Inverse of determinant-one matrices."""
    M = np.asarray(M)
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1]
    out[..., 0, 1] = -M[..., 0, 1]
    out[..., 1, 0] = -M[..., 1, 0]
    out[..., 1, 1] = M[..., 0, 0]
    return out


def strip_differential(M, s, t):
    """Real Jacobian in (s, t) of the Moebius map M at the strip point (s, t)."""
    z = strip_to_z(s, t)
    mu = z * mobius_derivative(M, z) / mobius(M, z)
    return _complex_to_real(mu)


def mobius_strip(M, s, t):
    """Action of M in strip coordinates; returns (s', t')."""
    return z_to_strip(mobius(M, strip_to_z(s, t)))


def elliptic_fixed_points(M, tol=1e-12):
    """Fixed points in H^2 of elliptic elements (|tr| < 2)."""
    M = np.asarray(M, dtype=float)
    a, b, c, d = M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
    tr = a + d
    disc = 4.0 - tr * tr
    if np.any(disc <= tol) or np.any(c == 0):
        raise ValueError("element is not elliptic")
    im = np.sqrt(disc) / (2 * np.abs(c))
    return (a - d) / (2 * c) + 1j * im


def strip_angle_to_uhp(s, t, ang):
    """Angle from d_x in the uhp chart of a vector at angle ``ang`` in (s, t)."""
    return np.asarray(ang) + 0.5 * np.pi + np.asarray(t)


# ------------------------------------------------------------ isometries

@dataclass(frozen=True, eq=False)
class Isom2:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(M)):
            raise ValueError("non-finite matrix")
        object.__setattr__(self, "matrix", canonical_sign(normalize_det(M)))

    def __matmul__(self, other: "Isom2") -> "Isom2":
        return Isom2(self.matrix @ other.matrix)

    def inverse(self) -> "Isom2":
        return Isom2(inv2(self.matrix))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def is_close(self, other: "Isom2", tol=1e-10) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) < tol)

    def apply(self, p: HPoint) -> HPoint:
        return HPoint.from_z(complex(mobius(self.matrix, p.z))).to(p.chart)

    def differential(self, v: HVector) -> HVector:
        z = v.base.z
        dz = complex(mobius_derivative(self.matrix, z)) * v.complex_uhp()
        q = HPoint.from_z(complex(mobius(self.matrix, z)))
        return HVector(q, (dz.real, dz.imag)).to(v.base.chart)

    def apply_boundary(self, x: float) -> float:
        return apply_boundary(self.matrix, x)


def isom_from_frames(p: HPoint, v: HVector, q: HPoint, u: HVector, tol=1e-10) -> Isom2:
    """The unique isometry with p -> q and v -> u (unit vectors)."""
    for vec, base in ((v, p), (u, q)):
        if abs(vec.base.z - base.z) > 1e-12 * (1.0 + abs(base.z)):
            raise ValueError("vector is not based at the given point")
        if abs(norm(vec) - 1.0) > tol:
            raise ValueError("frame vectors must be unit")
    av = np.angle(v.complex_uhp())
    au = np.angle(u.complex_uhp())
    return Isom2(frames_to_isometry(p.z, av, q.z, au))


def elliptic_fixed_point(g: Isom2) -> HPoint:
    return HPoint.from_z(complex(elliptic_fixed_points(g.matrix)))


def apply_boundary(M, x):
    """Action on the boundary R u {inf}; both infinities are the same point."""
    M = np.asarray(M, dtype=float)
    a, b, c, d = M.ravel()
    if math.isinf(x):
        return a / c if c != 0 else INFINITY
    den = c * x + d
    if den == 0:
        return INFINITY
    return (a * x + b) / den


def cross_ratio(a, b, c, d):
    """cr(a, b, c, d) = ((a - b)(c - d)) / ((b - c)(d - a)), limits at infinity.

    With this normalisation cr(-1, 0, 1, inf) = -1 (symmetric quadruple)."""
    pts = (a, b, c, d)
    n_inf = sum(math.isinf(p) for p in pts)
    if n_inf > 1 or len({p for p in pts if not math.isinf(p)}) < 4 - n_inf:
        raise ValueError("cross-ratio needs four distinct points")
    if math.isinf(a):
        return -(c - d) / (b - c)
    if math.isinf(b):
        return -(c - d) / (d - a)
    if math.isinf(c):
        return -(a - b) / (d - a)
    if math.isinf(d):
        return -(a - b) / (b - c)
    return ((a - b) * (c - d)) / ((b - c) * (d - a))
