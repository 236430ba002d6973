"""Optional numba acceleration.

Set ``APATHKIT_NO_NUMBA=1`` to force the pure-numpy code paths even when
numba is importable.
"""
from __future__ import annotations

import os

_disabled = os.environ.get("APATHKIT_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError
    from numba import njit, prange

    USE_NUMBA = True
except ImportError:
    USE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

    prange = range


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
