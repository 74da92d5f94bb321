"""Kernel backend selection.

Hot loops are compiled with numba when it is importable. Setting
``DUALBLOCH_BACKEND=numpy`` forces the pure-numpy fallback (useful for
debugging, profiling, or platforms without LLVM).
"""

import os

_requested = os.environ.get("DUALBLOCH_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(
        f"DUALBLOCH_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _requested == "numba"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(fn):
    """Compile ``fn`` in nopython mode if numba is available, else return it as is."""
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)
