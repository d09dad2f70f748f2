"""JIT switch for the hot kernels.

Kernels are written once as plain numpy-on-scalars Python. When numba is
importable and ``RMAB_LAB_NO_JIT`` is unset (or ``0``), they are compiled with
``numba.njit``; otherwise the same source runs interpreted. Both paths produce
identical results, the interpreted one is simply slow.
"""

import os

_flag = os.environ.get("RMAB_LAB_NO_JIT", "0").strip().lower()
DISABLE_JIT = _flag not in ("", "0", "false", "no")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USING_JIT = _numba is not None and not DISABLE_JIT


def njit(func):
    """Compile ``func`` in nopython mode, or return it untouched."""
    if USING_JIT:
        return _numba.njit(cache=True, nogil=True)(func)
    return func


def python_impl(func):
    """Return the uninterpreted Python source of a (possibly compiled) kernel."""
    return getattr(func, "py_func", func)
