"""Numba switch.

Set ``LART_NUMBA=0`` in the environment to force the pure-numpy kernels even
when numba is installed. Without numba the numpy path is always used.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("LART_NUMBA", "1").strip().lower() not in (
    "0", "false", "no", "off",
)


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if numba is None:
        return func
    return numba.njit(cache=True)(func)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
