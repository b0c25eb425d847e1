"""JIT dispatch for the hot Monte Carlo kernels.

Every kernel in this package is written as a plain loop-oriented numpy
function and compiled with numba's ``@njit`` when available.  Setting the
environment variable ``URLLCSIM_NO_NUMBA=1`` (or running without numba
installed) selects the pure-numpy fallback path: the same function bodies
run uncompiled, which is slow but produces identical results.

``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

NUMBA_DISABLED = os.environ.get("URLLCSIM_NO_NUMBA", "0") not in ("0", "", "false")

try:
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - environment without numba
    _numba = None
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def njit(func=None, **kwargs):
    """``numba.njit`` if enabled, identity decorator otherwise.

    fastmath stays off: kernels must give the same floats on both paths.
    """
    if func is None:
        return lambda f: njit(f, **kwargs)
    if not USING_NUMBA:
        return func
    kwargs.setdefault("cache", True)
    return _numba.njit(**kwargs)(func)
