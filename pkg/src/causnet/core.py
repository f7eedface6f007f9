"""Time-series containers, standardization and delay-embedding utilities.

Conventions used throughout the package:

* data arrays are shaped (n, K): one row per time point, one column per
  channel; node indices are 0-based internally and 1-based in reports;
* a "lag term" (i, l) refers to channel i observed l steps before the
  response sample.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstantChannel, SeriesTooShort


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TimeSeriesSet:
    """An (n, K) block of simultaneous observations with channel labels."""

    data: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError("data must be 2-D (n, K)")
        n, k = data.shape
        if n < 2 or k < 2:
            raise ValueError(f"need n >= 2 and K >= 2, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise ValueError("data contains NaN or Inf")
        labels = tuple(self.labels) or tuple(f"x{i + 1}" for i in range(k))
        if len(labels) != k:
            raise ValueError(f"{len(labels)} labels for {k} channels")
        object.__setattr__(self, "data", _freeze(data))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def K(self) -> int:
        return self.data.shape[1]

    def channel(self, i: int) -> np.ndarray:
        return self.data[:, i]

    def with_channel(self, i: int, values: np.ndarray) -> "TimeSeriesSet":
        """Copy of this set with channel i replaced (used by surrogate tests)."""
        data = np.array(self.data)
        data[:, i] = values
        return TimeSeriesSet(data, self.labels)

    def select(self, indices: list[int]) -> "TimeSeriesSet":
        """Sub-system restricted to the given channels, preserving order."""
        return TimeSeriesSet(self.data[:, indices], tuple(self.labels[i] for i in indices))


@dataclass(frozen=True)
class EmbeddingSpec:
    """Delay-embedding parameters: dimension m and lag step tau."""

    m: int
    tau: int = 1

    def __post_init__(self):
        if self.m < 1 or self.tau < 1:
            raise ValueError(f"need m >= 1 and tau >= 1, got m={self.m}, tau={self.tau}")

    def window(self) -> int:
        """Number of samples spanned by one embedding vector."""
        return (self.m - 1) * self.tau + 1


@dataclass(frozen=True)
class LagSet:
    """Ordered collection of (channel index, lag) regressor terms."""

    terms: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((int(i), int(l)) for i, l in self.terms)
        if any(l < 1 for _, l in terms):
            raise ValueError("lags must be >= 1")
        if len(set(terms)) != len(terms):
            raise ValueError("duplicate (channel, lag) terms")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def max_lag(self) -> int:
        return max((l for _, l in self.terms), default=0)

    def variables(self) -> set[int]:
        return {i for i, _ in self.terms}

    def without_variable(self, i: int) -> "LagSet":
        return LagSet(tuple(t for t in self.terms if t[0] != i))


@dataclass(frozen=True)
class CausalityMatrix:
    """K x K matrix of directed measure values, entry (i, j) = strength of i -> j.

    Diagonal entries are NaN sentinels and never enter downstream
    thresholding.
    """

    values: np.ndarray
    measure: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("values must be square")
        np.fill_diagonal(values, np.nan)
        off = values[~np.eye(values.shape[0], dtype=bool)]
        if not np.isfinite(off).all():
            raise ValueError("off-diagonal entries must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def K(self) -> int:
        return self.values.shape[0]

    def offdiag(self) -> np.ndarray:
        """Off-diagonal entries as a flat array (row-major order)."""
        mask = ~np.eye(self.K, dtype=bool)
        return self.values[mask]


def standardize(ts: TimeSeriesSet) -> TimeSeriesSet:
    """Rescale every channel to sample mean 0 and sample variance 1.

    Raises ConstantChannel if any channel has zero variance.
    """
    data = ts.data
    mean = data.mean(axis=0)
    # ddof=1 so that "variance 1" refers to the unbiased sample variance
    std = data.std(axis=0, ddof=1)
    if np.any(std == 0.0):
        bad = int(np.flatnonzero(std == 0.0)[0])
        raise ConstantChannel(f"channel {ts.labels[bad]} has zero variance")
    return TimeSeriesSet((data - mean) / std, ts.labels)


def delay_embed(x: np.ndarray, spec: EmbeddingSpec) -> np.ndarray:
    """Stack delay vectors (x_t, x_{t-tau}, ..., x_{t-(m-1)tau}) row by row.

    Returns an (n - (m-1)*tau, m) array whose row r corresponds to time
    t = (m-1)*tau + r (0-based), i.e. the first row is the earliest time at
    which the full vector exists and the last row is t = n - 1.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    w = spec.window()
    if n < w:
        raise SeriesTooShort(f"need n > (m-1)*tau = {w - 1}, got n = {n}")
    rows = n - (spec.m - 1) * spec.tau
    out = np.empty((rows, spec.m))
    for c in range(spec.m):
        shift = c * spec.tau
        out[:, c] = x[w - 1 - shift : n - shift]
    return out


def lagged_design(ts: TimeSeriesSet, lags: LagSet, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Build the regression (X, y) for predicting channel `target` from `lags`.

    Rows are aligned at times t = maxlag .. n-1 (0-based); column order
    follows the LagSet order. An empty LagSet yields a zero-column
    predictor matrix and the full response.
    """
    maxlag = lags.max_lag()
    n = ts.n
    if maxlag >= n:
        raise SeriesTooShort(f"max lag {maxlag} >= series length {n}")
    rows = n - maxlag
    X = np.empty((rows, len(lags)))
    for c, (i, l) in enumerate(lags):
        X[:, c] = ts.data[maxlag - l : n - l, i]
    y = ts.data[maxlag:, target]
    return X, y
