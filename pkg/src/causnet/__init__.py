"""Directed causality network reconstruction and benchmarking toolkit.

Reconstructs directed interaction networks from multivariate time series
with model-based, information-theoretic and frequency-domain measures,
binarizes them with surrogate or threshold criteria, and benchmarks the
measures against simulated coupled systems with known ground truth.
"""

from .core import CausalityMatrix, EmbeddingSpec, LagSet, TimeSeriesSet, standardize
from .evaluation import ConfusionCounts, EvaluationReport, confusion, indices
from .measures import MeasureSpec, compute_matrix, parse_measure
from .significance import AdjacencyNetwork, surrogate_test

__version__ = "0.1.0"

__all__ = [
    "AdjacencyNetwork",
    "CausalityMatrix",
    "ConfusionCounts",
    "EmbeddingSpec",
    "EvaluationReport",
    "LagSet",
    "MeasureSpec",
    "TimeSeriesSet",
    "compute_matrix",
    "confusion",
    "indices",
    "parse_measure",
    "standardize",
    "surrogate_test",
    "__version__",
]
