"""Pure numpy/scipy fallback for the compiled kernels.

All functions use the maximum-norm metric and strict (< radius) counting,
matching the convention of digamma-based mutual-information estimators.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

BACKEND = "python"


def count_within_radius(pts: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Number of other points strictly closer than radii[i] to point i."""
    pts = np.ascontiguousarray(pts, dtype=float)
    radii = np.asarray(radii, dtype=float)
    tree = cKDTree(pts)
    # query_ball_point includes the boundary; shrink to the next float down
    # so the count is strict, then drop the point itself (present only while
    # the shrunk radius stays >= 0, i.e. for any positive radius).
    counts = tree.query_ball_point(pts, np.nextafter(radii, -np.inf), p=np.inf, return_length=True)
    return np.asarray(counts, dtype=np.int64) - (radii > 0)


def conditioned_counts(pts: np.ndarray, dx: int, dy: int, radii: np.ndarray):
    """Strict counts in the (x,z), (y,z) and z subspaces of [x | y | z]."""
    pts = np.ascontiguousarray(pts, dtype=float)
    d = pts.shape[1]
    dz = d - dx - dy
    if dx < 1 or dy < 1 or dz < 1:
        raise ValueError("need at least one column in each of x, y, z")
    xz = np.ascontiguousarray(np.concatenate([pts[:, :dx], pts[:, dx + dy :]], axis=1))
    yz = np.ascontiguousarray(pts[:, dx:])
    z = np.ascontiguousarray(pts[:, dx + dy :])
    return (
        count_within_radius(xz, radii),
        count_within_radius(yz, radii),
        count_within_radius(z, radii),
    )
