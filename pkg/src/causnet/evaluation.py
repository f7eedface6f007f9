"""Network-recovery scoring: confusion counts, indices, ranks and scores.

All counts run over the K(K-1) ordered off-diagonal pairs. Indices follow
the usual conventions with every 0/0 resolved to 0 so that reports stay
total. Ranking across measures uses ordinal ranks with random (seeded)
assignment inside tied groups; scores normalize average ranks to [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .significance import AdjacencyNetwork


@dataclass(frozen=True)
class ConfusionCounts:
    TP: int
    FP: int
    FN: int
    TN: int

    @property
    def total(self) -> int:
        return self.TP + self.FP + self.FN + self.TN


@dataclass(frozen=True)
class EvaluationReport:
    """Derived indices of one estimated network against the truth."""

    counts: ConfusionCounts
    sens: float
    spec: float
    prec: float
    mcc: float
    fm: float
    hd: int


def confusion(truth: AdjacencyNetwork, estimate: AdjacencyNetwork) -> ConfusionCounts:
    """Counts over ordered off-diagonal pairs."""
    if truth.K != estimate.K:
        raise DimensionMismatch(f"K mismatch: {truth.K} vs {estimate.K}")
    off = ~np.eye(truth.K, dtype=bool)
    t = truth.matrix[off].astype(bool)
    e = estimate.matrix[off].astype(bool)
    return ConfusionCounts(
        TP=int(np.sum(t & e)),
        FP=int(np.sum(~t & e)),
        FN=int(np.sum(t & ~e)),
        TN=int(np.sum(~t & ~e)),
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def indices(c: ConfusionCounts) -> EvaluationReport:
    """Sensitivity, specificity, precision, the signed match correlation,
    the harmonic precision/sensitivity mean, and the raw mismatch count."""
    tp, fp, fn, tn = c.TP, c.FP, c.FN, c.TN
    mcc_den = np.sqrt(float(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
    mcc = (tp * tn - fp * fn) / mcc_den if mcc_den > 0 else 0.0
    return EvaluationReport(
        counts=c,
        sens=_ratio(tp, tp + fn),
        spec=_ratio(tn, tn + fp),
        prec=_ratio(tp, tp + fp),
        mcc=float(mcc),
        fm=_ratio(2 * tp, 2 * tp + fn + fp),
        hd=fp + fn,
    )


def rank_measures(mean_mcc: np.ndarray, seed=0) -> np.ndarray:
    """Ordinal ranks, 1 = highest value; tied values receive distinct
    consecutive ranks in seeded random order."""
    vals = np.asarray(mean_mcc, dtype=float)
    if vals.size < 2:
        raise ValueError("need at least two measures to rank")
    rng = np.random.default_rng(seed)
    tiebreak = rng.permutation(vals.size)
    order = np.lexsort((tiebreak, -vals))
    ranks = np.empty(vals.size, dtype=int)
    ranks[order] = np.arange(1, vals.size + 1)
    return ranks


def score_from_ranks(ranks_per_condition: np.ndarray, N: int) -> float:
    """Normalized score of one measure in one scenario: the average rank
    over the scenario's conditions mapped so 1 is best and 0 is worst."""
    P = float(np.mean(ranks_per_condition))
    return (N - P) / (N - 1)


@dataclass(frozen=True)
class ScoreTable:
    """Per-scenario scores (rows: measures, columns: scenarios) plus the
    overall per-measure average."""

    measures: tuple[str, ...]
    scenarios: tuple[str, ...]
    scores: np.ndarray  # (n_measures, n_scenarios)

    @property
    def overall(self) -> np.ndarray:
        return self.scores.mean(axis=1)


def score_table(
    ranks: np.ndarray, measures: list[str], scenarios: list[str], condition_of: np.ndarray
) -> ScoreTable:
    """Build the score table from an (n_measures, n_conditions) rank array
    where condition_of maps each condition column to its scenario index."""
    n_meas = ranks.shape[0]
    N = n_meas
    n_scen = len(scenarios)
    scores = np.empty((n_meas, n_scen))
    for s in range(n_scen):
        cols = np.flatnonzero(condition_of == s)
        for m in range(n_meas):
            scores[m, s] = score_from_ranks(ranks[m, cols], N)
    return ScoreTable(tuple(measures), tuple(scenarios), scores)
