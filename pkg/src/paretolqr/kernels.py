"""Backend selection for the hot loops.

The compiled extension is used when it was built; set
``PARETOLQR_PURE_PYTHON=1`` to force the pure-Python implementations.
"""
import os

from . import _pykernels

if os.environ.get("PARETOLQR_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

dominance_mask = _impl.dominance_mask
nearest_index = _impl.nearest_index
composition_grid = _impl.composition_grid
scalar_losses = _impl.scalar_losses
scalar_dare = _impl.scalar_dare

__all__ = [
    "BACKEND",
    "dominance_mask",
    "nearest_index",
    "composition_grid",
    "scalar_losses",
    "scalar_dare",
]
