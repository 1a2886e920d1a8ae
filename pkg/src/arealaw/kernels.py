"""Backend selection for the hot loops.

numba is used when it imports cleanly and ``AREALAW_DISABLE_NUMBA`` is not
set to a truthy value; otherwise the pure-numpy versions are bound.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_TRUTHY = {"1", "true", "yes", "on"}


def _numba_requested() -> bool:
    return os.environ.get("AREALAW_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY


def _load_backend():
    if _numba_requested():
        try:
            from . import _kernels_numba
        except ImportError:
            return _kernels_numpy, "numpy"
        return _kernels_numba, "numba"
    return _kernels_numpy, "numpy"


_backend, BACKEND = _load_backend()

cosine_row = _backend.cosine_row
literal_block = _backend.literal_block
literal_scalar = _backend.literal_scalar
pairing_sum = _backend.pairing_sum
quadratic_values = _backend.quadratic_values

__all__ = [
    "BACKEND",
    "cosine_row",
    "literal_block",
    "literal_scalar",
    "pairing_sum",
    "quadratic_values",
]
