"""Time-domain linear causality measures built on VAR residual variances.

Every measure is a log ratio of restricted to unrestricted residual
variance for the response equation; restricted and unrestricted fits share
one row alignment so the ratio is a pure effect of removing the driver.
Small negative estimates are legitimate noise and are not clipped.
"""
from __future__ import annotations

import numpy as np

from ..core import CausalityMatrix, TimeSeriesSet
from ..errors import SingularConditioningBlock
from ..varmodel import LaggedGram, RestrictedVarModel, _forward_bic, fit_restricted_var


def _all_cols(gram: LaggedGram) -> list[int]:
    return list(range(gram.K * gram.p_max))


def _cols_of(gram: LaggedGram, var: int) -> list[int]:
    return [gram.col(var, l) for l in range(1, gram.p_max + 1)]


def gci(ts: TimeSeriesSet, i: int, j: int, p: int, gram: LaggedGram | None = None) -> float:
    """Bivariate log variance ratio: AR(p) of the response alone versus a
    bivariate VAR(p) on driver and response."""
    if i == j:
        raise ValueError("driver and response must differ")
    g = gram if gram is not None else LaggedGram(ts.data, p)
    own = _cols_of(g, j)
    rss_r = g.rss(own, j)
    rss_u = g.rss(own + _cols_of(g, i), j)
    return float(np.log(rss_r / rss_u))


def cgci(ts: TimeSeriesSet, i: int, j: int, p: int, gram: LaggedGram | None = None) -> float:
    """Conditional variant: the full VAR(p) over all channels versus the same
    equation with the driver's lags removed."""
    if i == j:
        raise ValueError("driver and response must differ")
    g = gram if gram is not None else LaggedGram(ts.data, p)
    full = _all_cols(g)
    reduced = [c for c in full if c not in set(_cols_of(g, i))]
    rss_u = g.rss(full, j)
    rss_r = g.rss(reduced, j)
    return float(np.log(rss_r / rss_u))


def _partial_variance(cov: np.ndarray, y: int, z: list[int]) -> float:
    """cov_yy - cov_yz cov_zz^{-1} cov_zy."""
    if not z:
        return float(cov[y, y])
    czz = cov[np.ix_(z, z)]
    cyz = cov[y, z]
    try:
        sol = np.linalg.solve(czz, cyz)
    except np.linalg.LinAlgError as exc:
        raise SingularConditioningBlock("conditioning block not invertible") from exc
    return float(cov[y, y] - cyz @ sol)


def pgci(ts: TimeSeriesSet, i: int, j: int, p: int, gram: LaggedGram | None = None) -> float:
    """Partialized variant: conditions the residual variance of the response
    on the other equations' residuals, removing shared latent influence.

    Both models (with and without the driver variable) come from one lagged
    design; residual covariances are formed from Gram blocks.
    """
    if i == j:
        raise ValueError("driver and response must differ")
    K = ts.K
    if K < 3:
        raise ValueError("needs at least three channels")
    g = gram if gram is not None else LaggedGram(ts.data, p)
    others = [v for v in range(K) if v not in (i, j)]
    eqs = [j] + others  # response first, conditioning equations after

    full_cols = _all_cols(g)
    cov_full = _residual_cov(g, full_cols, eqs)
    reduced_cols = [c for c in full_cols if c not in set(_cols_of(g, i))]
    cov_red = _residual_cov(g, reduced_cols, eqs)

    z = list(range(1, len(eqs)))
    return float(np.log(_partial_variance(cov_red, 0, z) / _partial_variance(cov_full, 0, z)))


def _residual_cov(gram: LaggedGram, cols: list[int], eqs: list[int]) -> np.ndarray:
    """Residual covariance of the given equations fitted on the given columns."""
    G = gram.G[np.ix_(cols, cols)]
    B = gram.B[np.ix_(cols, eqs)]
    YY = gram.YY[np.ix_(eqs, eqs)]
    sol = np.linalg.solve(G, B)
    dof = gram.n_eff - len(cols)
    if dof <= 0:
        raise SingularConditioningBlock("no residual degrees of freedom")
    return (YY - B.T @ sol) / dof


def rcgci_matrix(ts: TimeSeriesSet, p_max: int, gram: LaggedGram | None = None) -> CausalityMatrix:
    """Restricted conditional measure for every ordered pair.

    One forward-BIC selection per equation; a pair's entry is zero whenever
    the driver contributes no selected lag, otherwise the log variance
    ratio of refitting without the driver's selected lags.
    """
    g = gram if gram is not None else LaggedGram(ts.data, p_max)
    model = fit_restricted_var(ts, p_max, gram=g)
    K = g.K
    vals = np.zeros((K, K))
    for j in range(K):
        sel_cols = [g.col(i, l) for i, l in model.terms[j]]
        rss_with = model.resid_var[j] * g.n_eff
        for i in model.terms[j].variables():
            keep = [g.col(v, l) for v, l in model.terms[j] if v != i]
            rss_without = g.rss(keep, j)
            vals[i, j] = np.log(rss_without / rss_with)
    return CausalityMatrix(vals, "rcgci", {"p": p_max})


def rcgci_pair(ts: TimeSeriesSet, i: int, j: int, p_max: int, gram: LaggedGram | None = None) -> float:
    """Single-pair restricted measure: selection for the response equation only."""
    if i == j:
        raise ValueError("driver and response must differ")
    g = gram if gram is not None else LaggedGram(ts.data, p_max)
    sel, rss = _forward_bic(g, j)
    if i not in {v for v, _ in sel}:
        return 0.0
    keep = [g.col(v, l) for v, l in sel if v != i]
    return float(np.log(g.rss(keep, j) / rss))


def gci_matrix(ts: TimeSeriesSet, p: int) -> CausalityMatrix:
    g = LaggedGram(ts.data, p)
    K = ts.K
    vals = np.zeros((K, K))
    for j in range(K):
        for i in range(K):
            if i != j:
                vals[i, j] = gci(ts, i, j, p, gram=g)
    return CausalityMatrix(vals, "gci", {"p": p})


def cgci_matrix(ts: TimeSeriesSet, p: int) -> CausalityMatrix:
    g = LaggedGram(ts.data, p)
    K = ts.K
    vals = np.zeros((K, K))
    for j in range(K):
        for i in range(K):
            if i != j:
                vals[i, j] = cgci(ts, i, j, p, gram=g)
    return CausalityMatrix(vals, "cgci", {"p": p})


def pgci_matrix(ts: TimeSeriesSet, p: int) -> CausalityMatrix:
    g = LaggedGram(ts.data, p)
    K = ts.K
    vals = np.zeros((K, K))
    for j in range(K):
        for i in range(K):
            if i != j:
                vals[i, j] = pgci(ts, i, j, p, gram=g)
    return CausalityMatrix(vals, "pgci", {"p": p})
