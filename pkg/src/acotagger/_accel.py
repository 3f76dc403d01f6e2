"""Numba switch.

Set ``ACOTAGGER_DISABLE_NUMBA=1`` before import to force the pure-numpy
kernels; they are also used automatically when numba is not installed.
"""

import os

DISABLE_ENV = "ACOTAGGER_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
