"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled extension serves the neighbor-counting kernels behind the
entropy estimators and the forward-regression path behind the sparse VAR
fits; a numpy/scipy fallback is selected at import when the extension is
unavailable (set ``CAUSNET_PURE_PYTHON=1`` to force it). Counting results
are identical across backends. The k-th-neighbor search is always served
by scipy's compiled k-d tree, which wins over a window scan there.
"""
import os

import numpy as np
from scipy.spatial import cKDTree

if os.environ.get("CAUSNET_PURE_PYTHON"):
    from . import _pure as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

count_within_radius = _impl.count_within_radius
conditioned_counts = _impl.conditioned_counts
# None signals callers to use their numpy selection path
forward_bic_path = getattr(_impl, "forward_bic_path", None)
BACKEND = _impl.BACKEND


def kth_neighbor_distance(pts: np.ndarray, k: int) -> np.ndarray:
    """Max-norm distance from each point to its k-th nearest neighbor."""
    pts = np.ascontiguousarray(pts, dtype=float)
    n = pts.shape[0]
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    dist, _ = cKDTree(pts).query(pts, k=k + 1, p=np.inf)
    return dist[:, -1]


__all__ = [
    "kth_neighbor_distance",
    "count_within_radius",
    "conditioned_counts",
    "forward_bic_path",
    "BACKEND",
]
