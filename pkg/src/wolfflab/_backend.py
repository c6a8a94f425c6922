"""Backend selection for the numeric kernels.

``WOLFFLAB_BACKEND=numpy`` forces the pure-numpy path; anything else (or
unset) uses numba when it imports cleanly.
"""
import os

_requested = os.environ.get("WOLFFLAB_BACKEND", "numba").strip().lower()

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

BACKEND = "numba" if (HAVE_NUMBA and _requested != "numpy") else "numpy"
