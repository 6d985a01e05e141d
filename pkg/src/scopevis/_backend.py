"""Kernel backend selection.

The compiled extension is used when it imports; set ``SCOPEVIS_PURE_PYTHON=1``
to force the numpy fallback (results are identical, only slower).
"""
import os

from . import _kernels_py

if os.environ.get("SCOPEVIS_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

ncc_map = kernels.ncc_map
draw_polyline = kernels.draw_polyline

__all__ = ["BACKEND", "ncc_map", "draw_polyline", "kernels"]
