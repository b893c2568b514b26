"""Pure-Python profile kernels.

Mirror of ``_kernels.pyx``: same quadrature rule, same splitting, same
bisection, so both backends agree to roundoff.
"""
import math
from functools import lru_cache

import numpy as np

XGK = (0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
       0.207784955007898467600689403773245, 0.0)
WGK = (0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
       0.204432940075298892414161999234649, 0.209482141084727828012999174891714)
WG = (0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327)

QUAD_TOL = 1e-14
MAX_DEPTH = 48
MAX_BISECT = 200
EPS = 2.220446049250313e-16


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    k = fc * WGK[7]
    g = fc * WG[3]
    for j in range(7):
        dx = h * XGK[j]
        pair = f(c - dx) + f(c + dx)
        k += WGK[j] * pair
        if j & 1:
            g += WG[j >> 1] * pair
    return k * h, abs((k - g) * h)


def _adapt(f, a, b, tol, depth):
    val, err = _gk15(f, a, b)
    if err <= tol or err <= 50.0 * EPS * abs(val) or depth >= MAX_DEPTH:
        return val
    m = 0.5 * (a + b)
    return _adapt(f, a, m, 0.5 * tol, depth + 1) + _adapt(f, m, b, 0.5 * tol, depth + 1)


def integrate(f, a, b, tol=QUAD_TOL):
    if a == b:
        return 0.0
    return _adapt(f, a, b, tol, 0)


@lru_cache(maxsize=64)
def _consts(theta):
    c = math.cos(theta)
    s2 = math.sin(theta) ** 2

    def head(u):
        return 1.0 / ((4.0 + u * u) * math.sqrt(4.0 * s2 + u * u))

    def tail(w):
        return w / ((4.0 * w * w + 1.0) * math.sqrt(4.0 * w * w * s2 + 1.0))

    ih = integrate(head, 0.0, 1.0)
    it = integrate(tail, 0.0, 1.0)
    return c, s2, head, tail, ih, it


def f_integral(r, theta):
    c, s2, head, tail, ih, it = _consts(theta)
    if r <= 1.0:
        return -2.0 * c * integrate(head, 0.0, r)
    return -2.0 * c * (ih + integrate(tail, 1.0 / r, 1.0))


def f_infinity(theta):
    c, s2, head, tail, ih, it = _consts(theta)
    return -2.0 * c * (ih + it)


def f_tail(r, theta):
    """F(r) - F(inf), evaluated without cancellation for large r."""
    c, s2, head, tail, ih, it = _consts(theta)
    if r <= 1.0:
        return 2.0 * c * (integrate(head, r, 1.0) + it)
    return 2.0 * c * integrate(tail, 0.0, 1.0 / r)


def _log_h(r, theta):
    if r <= 1.0:
        return 0.5 * math.log(r) - 0.25 * math.log(r * r + 4.0) + f_tail(r, theta)
    return -0.25 * math.log1p(4.0 / (r * r)) + f_tail(r, theta)


def g_value(r, theta):
    if r <= 0.0:
        return -0.5 * math.pi
    lh = _log_h(r, theta)
    one_minus_h = -math.expm1(lh)
    return -2.0 * math.asin(math.sqrt(0.5 * one_minus_h))


def log_derivative_h(r, theta):
    """h'/h for h = cos G."""
    c = math.cos(theta)
    s2 = math.sin(theta) ** 2
    q = math.sqrt(r * r + 4.0 * s2)
    if c >= 0.0:
        return 2.0 * s2 / (r * q * (q + r * c))
    return (2.0 / (4.0 + r * r)) * (1.0 / r - c / q)


def g_derivative(r, theta):
    lh = _log_h(r, theta)
    h = math.exp(lh)
    return h * log_derivative_h(r, theta) / math.sqrt(-math.expm1(2.0 * lh))


def g_inverse(t, theta):
    if not (-0.5 * math.pi < t < 0.0):
        raise ValueError("t must lie in (-pi/2, 0)")
    lo, hi = 0.0, 1.0
    while g_value(hi, theta) < t:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("no bracket for G^-1")
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g_value(mid, theta) < t:
            lo = mid
        else:
            hi = mid
    if abs(g_value(lo, theta) - t) < abs(g_value(hi, theta) - t):
        return lo
    return hi


def phi_increment(r0, r1, theta):
    """Integral of r G'(r) over [r0, r1]; r = v^2 below 1, r = e^y above."""
    if r1 < r0:
        return -phi_increment(r1, r0, theta)

    def low(v):
        r = v * v
        return 2.0 * v * r * g_derivative(r, theta)

    def high(y):
        r = math.exp(y)
        return r * r * g_derivative(r, theta)

    total = 0.0
    if r0 < 1.0:
        total += integrate(low, math.sqrt(r0), math.sqrt(min(r1, 1.0)), 1e-13)
    if r1 > 1.0:
        total += integrate(high, math.log(max(r0, 1.0)), math.log(r1), 1e-13)
    return total


def profile_arrays(t, theta):
    """phi' and phi at increasing t in (-pi/2, 0)."""
    t = np.asarray(t, dtype=float)
    n = t.shape[0]
    dphi = np.empty(n)
    phi = np.empty(n)
    r_prev = 0.0
    acc = 0.0
    for i in range(n):
        if i and t[i] <= t[i - 1]:
            raise ValueError("t must be strictly increasing")
        r = g_inverse(float(t[i]), theta)
        acc += phi_increment(r_prev, r, theta)
        dphi[i] = r
        phi[i] = acc
        r_prev = r
    return dphi, phi
