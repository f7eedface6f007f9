"""Binarization of causality matrices: surrogate testing and thresholds.

Three routes turn a weighted matrix into a binary network: a one-sided
randomization test against time-shifted surrogates of the driver channel,
a fixed edge-count threshold, and a fixed magnitude threshold. A fourth,
for the mixed-embedding measure only, keeps the strictly positive entries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CausalityMatrix, TimeSeriesSet
from .errors import DimensionMismatch, SeriesTooShort

_SHIFT_GUARD = 20


@dataclass(frozen=True)
class SurrogateTestResult:
    """Original measure value, its surrogate sample, and the rank p-value."""

    original: float
    surrogates: np.ndarray
    rank: int
    p_value: float


@dataclass(frozen=True)
class AdjacencyNetwork:
    """Binary directed network plus a record of how it was obtained."""

    matrix: np.ndarray
    criterion: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int8)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if np.any(np.diag(m) != 0):
            raise ValueError("diagonal must be zero")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("entries must be 0/1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def K(self) -> int:
        return self.matrix.shape[0]

    @property
    def edges(self) -> int:
        return int(self.matrix.sum())


def time_shift_surrogate(x: np.ndarray, seed) -> np.ndarray:
    """Cyclic rotation by a random step, kept away from the near-identity
    shifts at both ends. Preserves the marginal distribution exactly."""
    x = np.asarray(x)
    n = x.shape[0]
    if n < 100:
        raise SeriesTooShort(f"need n >= 100 for a meaningful shift, got {n}")
    rng = np.random.default_rng(seed)
    w = int(rng.integers(_SHIFT_GUARD, n - _SHIFT_GUARD + 1))
    return np.roll(x, -w)


def rank_p_value(rank: int, M: int) -> float:
    """One-sided p-value of rank r0 among M+1 ordered statistic values."""
    return 1.0 - (rank - 0.326) / (M + 1 + 0.348)


def surrogate_test(
    evaluate,
    ts: TimeSeriesSet,
    i: int,
    j: int,
    M: int = 100,
    seed=0,
) -> SurrogateTestResult:
    """One-sided randomization test of the directed effect i -> j.

    The measure is evaluated once on the original series and M times with
    the driver channel replaced by a time-shifted surrogate (response and
    conditioning channels untouched). The original's ascending rank, with
    the original placed below any ties, sets the p-value: a large original
    value yields a small p.
    """
    if M < 19:
        raise ValueError("need at least 19 surrogates")
    original = float(evaluate(ts, i, j))
    base = ts.channel(i)
    surrogates = np.empty(M)
    for m in range(M):
        shifted = time_shift_surrogate(base, np.random.SeedSequence((seed, i, j, m)))
        surrogates[m] = evaluate(ts.with_channel(i, shifted), i, j)
    rank = 1 + int(np.sum(surrogates < original))
    return SurrogateTestResult(
        original=original,
        surrogates=surrogates,
        rank=rank,
        p_value=rank_p_value(rank, M),
    )


def binarize_significance(pvals: np.ndarray, alpha: float) -> AdjacencyNetwork:
    """Edge wherever the pair's p-value is below the significance level."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    p = np.asarray(pvals, dtype=float)
    m = np.zeros_like(p, dtype=np.int8)
    off = ~np.eye(p.shape[0], dtype=bool)
    m[off] = p[off] < alpha
    return AdjacencyNetwork(m, f"significance(alpha={alpha:g})")


def binarize_density(cm: CausalityMatrix, rho: int) -> AdjacencyNetwork:
    """Keep exactly the rho largest off-diagonal entries as edges.

    Boundary ties are resolved in favor of the lexicographically smaller
    (row, column) pair, so the edge count is exact.
    """
    K = cm.K
    if not 1 <= rho <= K * (K - 1):
        raise ValueError(f"rho must be in [1, {K * (K - 1)}]")
    rows, cols = np.where(~np.eye(K, dtype=bool))
    vals = cm.values[rows, cols]
    order = np.lexsort((cols, rows, -vals))  # value desc, then (i, j) asc
    m = np.zeros((K, K), dtype=np.int8)
    take = order[:rho]
    m[rows[take], cols[take]] = 1
    return AdjacencyNetwork(m, f"density(rho={rho})")


def binarize_magnitude(cm: CausalityMatrix, threshold: float) -> AdjacencyNetwork:
    """Edge wherever the entry reaches the fixed magnitude threshold.

    The comparison is inclusive so that thresholding one realization at its
    own rho-th largest value yields exactly rho edges.
    """
    K = cm.K
    m = np.zeros((K, K), dtype=np.int8)
    off = ~np.eye(K, dtype=bool)
    m[off] = cm.values[off] >= threshold
    return AdjacencyNetwork(m, f"magnitude(th={threshold:.6g})")


def threshold_from_density(matrices: list[CausalityMatrix], rho: int) -> float:
    """Magnitude threshold matched to a target density: the mean over
    realizations of each matrix's rho-th largest off-diagonal value."""
    if not matrices:
        raise ValueError("need at least one realization")
    K = matrices[0].K
    if not 1 <= rho <= K * (K - 1):
        raise ValueError(f"rho must be in [1, {K * (K - 1)}]")
    kth = [np.sort(cm.offdiag())[-rho] for cm in matrices]
    return float(np.mean(kth))


def binarize_positive(cm: CausalityMatrix) -> AdjacencyNetwork:
    """Edge wherever the entry is strictly positive (mixed-embedding rule)."""
    K = cm.K
    m = np.zeros((K, K), dtype=np.int8)
    off = ~np.eye(K, dtype=bool)
    m[off] = cm.values[off] > 0.0
    return AdjacencyNetwork(m, "positive")
