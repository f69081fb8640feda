"""Backend selection for the hot kernels.

``PTKL_BACKEND=numpy`` disables numba entirely; the default is numba when it
imports cleanly. The choice is fixed at import time.
"""
import os

_requested = os.environ.get("PTKL_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"PTKL_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = False
if _requested == "numba":
    try:
        import numba

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        pass

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def jit(func):
    """``numba.njit`` (nogil, cached) on the numba backend, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func
