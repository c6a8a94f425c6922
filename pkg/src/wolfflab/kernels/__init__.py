"""Numeric kernels, dispatched to numba or numpy by ``WOLFFLAB_BACKEND``.

Every function here takes plain arrays.  Both implementations stay
importable as ``kernels.numpy_impl`` / ``kernels.numba_impl`` so the
benchmark and the tests can compare them side by side.
"""
from types import SimpleNamespace

import numpy as np

from .._backend import BACKEND, HAVE_NUMBA
from . import _vectorized

numpy_impl = SimpleNamespace(
    name="numpy",
    log_eval=_vectorized.log_eval,
    cap_fraction=lambda hs, n: _vectorized.cap_fraction(hs, n),
    radial_cumulative=_vectorized.radial_cumulative,
    ball_integrals=_vectorized.ball_integrals,
)

if HAVE_NUMBA:
    from . import _loops

    numba_impl = SimpleNamespace(
        name="numba",
        log_eval=lambda lx, ly, s_in, s_out, xs: _loops.log_eval_many(
            lx, ly, float(s_in), float(s_out), np.atleast_1d(np.asarray(xs, dtype=float))),
        cap_fraction=lambda hs, n: _loops.cap_fraction(np.atleast_1d(np.asarray(hs, dtype=float)), int(n)),
        radial_cumulative=lambda lx, ly, s_in, s_out, n, rs: _loops.radial_cumulative(
            lx, ly, float(s_in), float(s_out), int(n), np.atleast_1d(np.asarray(rs, dtype=float))),
        ball_integrals=_loops.ball_integrals,
    )
else:  # pragma: no cover
    numba_impl = None

active = numba_impl if BACKEND == "numba" else numpy_impl

__all__ = ["active", "numpy_impl", "numba_impl", "BACKEND"]
