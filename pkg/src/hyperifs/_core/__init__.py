"""Numerical core: compiled Cython kernels with a pure-numpy fallback.

The compiled extension is preferred; set ``HYPERIFS_PURE=1`` to force
the fallback (used by the benchmark and for debugging).
"""

import os

if os.environ.get("HYPERIFS_PURE"):
    from . import _fallback as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _fallback as _impl
        BACKEND = "python"

directed_hausdorff = _impl.directed_hausdorff
min_distances = _impl.min_distances

__all__ = ["BACKEND", "directed_hausdorff", "min_distances"]
