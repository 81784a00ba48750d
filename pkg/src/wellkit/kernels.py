"""Selects the compiled kernels when available, else the Python fallback.

Set ``WELLKIT_PURE=1`` to force the fallback.  ``BACKEND`` names the choice.
"""
import os

from . import _pykernels

if os.environ.get("WELLKIT_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

label_components = _impl.label_components
sweep = _impl.sweep
reduce_columns = _impl.reduce_columns

__all__ = ["BACKEND", "label_components", "sweep", "reduce_columns"]
