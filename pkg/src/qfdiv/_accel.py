"""Kernel backend selection.

Hot loops are written once as plain Python over numpy arrays.  When numba is
importable and ``QFDIV_NUMBA`` is not set to ``0``, they are compiled with
``@njit``; otherwise a vectorised numpy implementation is used instead.
"""

import os

_FLAG = os.environ.get("QFDIV_NUMBA", "1").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("0", "false", "no", "off")


def njit(func):
    """Compile ``func`` with numba (cached, nopython) or return it unchanged."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
