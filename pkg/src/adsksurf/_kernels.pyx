# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled profile kernels (same algorithms as _kernels_py)."""
import numpy as np
from libc.math cimport sqrt, log, log1p, exp, expm1, asin, cos, sin, fabs, M_PI

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

DEF MAX_DEPTH = 48
DEF MAX_BISECT = 200
DEF EPS = 2.220446049250313e-16

ctypedef struct Par:
    double theta
    double c
    double s2
    double ih
    double it

ctypedef double (*fn_t)(double, Par*)


cdef double _gk15(fn_t f, Par* p, double a, double b, double* err):
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fc = f(c, p)
    cdef double k = fc * WGK[7]
    cdef double g = fc * WG[3]
    cdef double dx, pair
    cdef int j
    for j in range(7):
        dx = h * XGK[j]
        pair = f(c - dx, p) + f(c + dx, p)
        k += WGK[j] * pair
        if j & 1:
            g += WG[j >> 1] * pair
    err[0] = fabs((k - g) * h)
    return k * h


cdef double _adapt(fn_t f, Par* p, double a, double b, double tol, int depth):
    cdef double err
    cdef double val = _gk15(f, p, a, b, &err)
    if err <= tol or err <= 50.0 * EPS * fabs(val) or depth >= MAX_DEPTH:
        return val
    cdef double m = 0.5 * (a + b)
    return _adapt(f, p, a, m, 0.5 * tol, depth + 1) + _adapt(f, p, m, b, 0.5 * tol, depth + 1)


cdef double _integrate(fn_t f, Par* p, double a, double b, double tol):
    if a == b:
        return 0.0
    return _adapt(f, p, a, b, tol, 0)


cdef double _head(double u, Par* p):
    return 1.0 / ((4.0 + u * u) * sqrt(4.0 * p.s2 + u * u))


cdef double _tail(double w, Par* p):
    return w / ((4.0 * w * w + 1.0) * sqrt(4.0 * w * w * p.s2 + 1.0))


cdef Par _cache
_cache.theta = -1.0


cdef Par* _par(double theta):
    global _cache
    if _cache.theta != theta:
        _cache.theta = theta
        _cache.c = cos(theta)
        _cache.s2 = sin(theta) ** 2
        _cache.ih = _integrate(_head, &_cache, 0.0, 1.0, 1e-14)
        _cache.it = _integrate(_tail, &_cache, 0.0, 1.0, 1e-14)
    return &_cache


cdef double _f_tail(double r, Par* p):
    if r <= 1.0:
        return 2.0 * p.c * (_integrate(_head, p, r, 1.0, 1e-14) + p.it)
    return 2.0 * p.c * _integrate(_tail, p, 0.0, 1.0 / r, 1e-14)


cdef double _log_h(double r, Par* p):
    if r <= 1.0:
        return 0.5 * log(r) - 0.25 * log(r * r + 4.0) + _f_tail(r, p)
    return -0.25 * log1p(4.0 / (r * r)) + _f_tail(r, p)


cdef double _g(double r, Par* p):
    if r <= 0.0:
        return -0.5 * M_PI
    return -2.0 * asin(sqrt(-0.5 * expm1(_log_h(r, p))))


cdef double _dlogh(double r, Par* p):
    cdef double q = sqrt(r * r + 4.0 * p.s2)
    if p.c >= 0.0:
        return 2.0 * p.s2 / (r * q * (q + r * p.c))
    return (2.0 / (4.0 + r * r)) * (1.0 / r - p.c / q)


cdef double _gp(double r, Par* p):
    cdef double lh = _log_h(r, p)
    return exp(lh) * _dlogh(r, p) / sqrt(-expm1(2.0 * lh))


cdef double _low(double v, Par* p):
    cdef double r = v * v
    return 2.0 * v * r * _gp(r, p)


cdef double _high(double y, Par* p):
    cdef double r = exp(y)
    return r * r * _gp(r, p)


cdef double _ginv(double t, Par* p) except? -1.0:
    cdef double lo = 0.0, hi = 1.0, mid
    cdef int i
    while _g(hi, p) < t:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("no bracket for G^-1")
    for i in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _g(mid, p) < t:
            lo = mid
        else:
            hi = mid
    if fabs(_g(lo, p) - t) < fabs(_g(hi, p) - t):
        return lo
    return hi


cdef double _phi_inc(double r0, double r1, Par* p):
    if r1 < r0:
        return -_phi_inc(r1, r0, p)
    cdef double total = 0.0
    if r0 < 1.0:
        total += _integrate(_low, p, sqrt(r0), sqrt(min(r1, 1.0)), 1e-13)
    if r1 > 1.0:
        total += _integrate(_high, p, log(max(r0, 1.0)), log(r1), 1e-13)
    return total


def f_integral(double r, double theta):
    cdef Par* p = _par(theta)
    if r <= 1.0:
        return -2.0 * p.c * _integrate(_head, p, 0.0, r, 1e-14)
    return -2.0 * p.c * (p.ih + _integrate(_tail, p, 1.0 / r, 1.0, 1e-14))


def f_infinity(double theta):
    cdef Par* p = _par(theta)
    return -2.0 * p.c * (p.ih + p.it)


def f_tail(double r, double theta):
    return _f_tail(r, _par(theta))


def g_value(double r, double theta):
    return _g(r, _par(theta))


def log_derivative_h(double r, double theta):
    return _dlogh(r, _par(theta))


def g_derivative(double r, double theta):
    return _gp(r, _par(theta))


def g_inverse(double t, double theta):
    if not (-0.5 * M_PI < t < 0.0):
        raise ValueError("t must lie in (-pi/2, 0)")
    return _ginv(t, _par(theta))


def phi_increment(double r0, double r1, double theta):
    return _phi_inc(r0, r1, _par(theta))


def profile_arrays(t, double theta):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t n = tv.shape[0], i
    out_d = np.empty(n)
    out_p = np.empty(n)
    cdef double[::1] d = out_d
    cdef double[::1] ph = out_p
    cdef Par* p = _par(theta)
    cdef double r_prev = 0.0, acc = 0.0, r
    for i in range(n):
        if i and tv[i] <= tv[i - 1]:
            raise ValueError("t must be strictly increasing")
        if not (-0.5 * M_PI < tv[i] < 0.0):
            raise ValueError("t must lie in (-pi/2, 0)")
        r = _ginv(tv[i], p)
        acc += _phi_inc(r_prev, r, p)
        d[i] = r
        ph[i] = acc
        r_prev = r
    return out_d, out_p
