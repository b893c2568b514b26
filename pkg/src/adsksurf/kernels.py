"""Backend selection for the profile kernels.

The compiled extension is used when importable; set ``ADSKSURF_PURE_PYTHON=1``
to force the pure-Python twin.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("ADSKSURF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

f_integral = _impl.f_integral
f_infinity = _impl.f_infinity
f_tail = _impl.f_tail
g_value = _impl.g_value
g_derivative = _impl.g_derivative
log_derivative_h = _impl.log_derivative_h
g_inverse = _impl.g_inverse
phi_increment = _impl.phi_increment
profile_arrays = _impl.profile_arrays


def backends():
    """Available backend modules keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
