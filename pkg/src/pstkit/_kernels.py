"""Hot loops of the numerical oracle.

Each kernel has a numba version and a pure-numpy version with identical
results.  Set ``PSTKIT_DISABLE_NUMBA=1`` to force the numpy path (it is also
used automatically when numba cannot be imported).
"""
from __future__ import annotations

import math
import os

import numpy as np

_DISABLED = os.environ.get("PSTKIT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("disabled by PSTKIT_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

# bounds the (chunk x n) complex temporary of the numpy path
_CHUNK = 4096


def amplitude_grid_numpy(coef: np.ndarray, lam: np.ndarray, times: np.ndarray) -> np.ndarray:
    """``|sum_k coef[k] exp(i t lam[k])|`` for every ``t`` in ``times``."""
    out = np.empty(times.shape[0])
    for s in range(0, times.shape[0], _CHUNK):
        t = times[s:s + _CHUNK]
        out[s:s + _CHUNK] = np.abs(np.exp(1j * np.outer(t, lam)) @ coef)
    return out


if HAVE_NUMBA:
    @njit(cache=True, fastmath=False)
    def amplitude_grid_numba(coef, lam, times):
        out = np.empty(times.shape[0])
        for i in range(times.shape[0]):
            t = times[i]
            re = 0.0
            im = 0.0
            for k in range(lam.shape[0]):
                ph = t * lam[k]
                re += coef[k] * math.cos(ph)
                im += coef[k] * math.sin(ph)
            out[i] = math.sqrt(re * re + im * im)
        return out

    amplitude_grid = amplitude_grid_numba
else:
    amplitude_grid_numba = None
    amplitude_grid = amplitude_grid_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
