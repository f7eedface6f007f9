"""Vector-autoregression fitting and frequency-domain transforms.

Two fitting routes are provided: an ordinary least-squares fit of the full
lag set, and a per-equation forward selection that grows a sparse lag set
under BIC. Both work on standardized series and fit no intercept. The
forward selection and the pairwise refits used by surrogate testing run on
a shared Gram matrix so that repeated fits on modified channels stay cheap.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ._kernels import forward_bic_path
from .core import LagSet, TimeSeriesSet
from .errors import IllConditioned, SeriesTooShort, SingularAtFrequency

_COND_LIMIT = 1e12
# per-term selection penalty, in units of ln(n); the plain information
# criterion (1.0) over-selects deep proxy lags on smooth oscillatory data
_BIC_PENALTY = 2.5


def companion_spectral_radius(coeffs: np.ndarray) -> float:
    """Spectral radius of the companion matrix of a coefficient stack (p, K, K)."""
    p, K, _ = coeffs.shape
    comp = np.zeros((K * p, K * p))
    comp[:K, :] = np.concatenate(list(coeffs), axis=1)
    if p > 1:
        comp[K:, : K * (p - 1)] = np.eye(K * (p - 1))
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


@dataclass(frozen=True)
class VarModel:
    """Full VAR(p) fit: coeffs[k][j, i] multiplies channel i at lag k+1 in
    channel j's equation."""

    p: int
    coeffs: np.ndarray  # (p, K, K)
    sigma: np.ndarray  # (K, K) residual covariance
    residuals: np.ndarray | None  # (n_eff, K); None for Gram-only fits
    n_eff: int

    @property
    def K(self) -> int:
        return self.coeffs.shape[1]

    @property
    def sigma_j(self) -> np.ndarray:
        """Per-equation residual variances."""
        return np.diag(self.sigma)

    def is_stable(self) -> bool:
        return companion_spectral_radius(self.coeffs) < 1.0


@dataclass(frozen=True)
class RestrictedVarModel:
    """Sparse per-equation VAR: only the selected lag terms carry coefficients."""

    p_max: int
    terms: tuple[LagSet, ...]  # per response equation
    coeffs: tuple[np.ndarray, ...]  # aligned with terms
    resid_var: np.ndarray  # (K,)
    n_eff: int

    @property
    def K(self) -> int:
        return len(self.terms)

    def coefficient_stack(self) -> np.ndarray:
        """Dense (p_max, K, K) stack with zeros at unselected terms."""
        K = self.K
        out = np.zeros((self.p_max, K, K))
        for j, (lagset, beta) in enumerate(zip(self.terms, self.coeffs)):
            for (i, lag), b in zip(lagset, beta):
                out[lag - 1, j, i] = b
        return out

    def sigma_matrix(self) -> np.ndarray:
        return np.diag(self.resid_var)


class SpectralModel:
    """Frequency-domain transforms of a fitted VAR on a grid in (0, 0.5].

    abar holds I - sum_k A_k exp(-i 2 pi f k) per grid frequency; the
    transfer matrix (its inverse) and the spectral matrix H Sigma H* are
    computed on first access since several measures never need them.
    """

    def __init__(self, freqs: np.ndarray, abar: np.ndarray, sigma: np.ndarray):
        self.freqs = freqs
        self.abar = abar
        self.sigma = sigma
        self._transfer: np.ndarray | None = None
        self._spectrum: np.ndarray | None = None

    @property
    def K(self) -> int:
        return self.abar.shape[1]

    @property
    def transfer(self) -> np.ndarray:
        if self._transfer is None:
            try:
                self._transfer = np.linalg.inv(self.abar)
            except np.linalg.LinAlgError as exc:
                raise SingularAtFrequency("Abar(f) is singular on the frequency grid") from exc
        return self._transfer

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            h = self.transfer
            self._spectrum = h @ self.sigma @ np.conj(np.swapaxes(h, 1, 2))
        return self._spectrum


# ---------------------------------------------------------------------------
# design-matrix plumbing

def _design(ts_data: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Full lagged design at alignment p: columns ordered lag-major,
    channel-minor (channel i, lag l) -> column (l-1)*K + i."""
    n, K = ts_data.shape
    rows = n - p
    if n <= K * p + 10 or rows <= K * p:
        raise SeriesTooShort(f"need n > K*p + 10 with free residual dof, got n={n}, K={K}, p={p}")
    Z = np.empty((rows, K * p))
    for l in range(1, p + 1):
        Z[:, (l - 1) * K : l * K] = ts_data[p - l : n - l]
    Y = ts_data[p:]
    return Z, Y


def fit_var_ols(ts: TimeSeriesSet, p: int, variables: list[int] | None = None) -> VarModel:
    """Least-squares VAR(p) on all channels (or the given subset).

    Residual covariance is the residual cross-product matrix divided by
    (rows - regressors). Raises IllConditioned when the design is
    numerically singular.
    """
    if p < 1:
        raise ValueError("order must be >= 1")
    data = ts.data if variables is None else ts.data[:, variables]
    K = data.shape[1]
    Z, Y = _design(data, p)
    beta, _, rank, sv = np.linalg.lstsq(Z, Y, rcond=None)
    if rank < Z.shape[1] or sv[0] / sv[-1] > _COND_LIMIT:
        raise IllConditioned(f"design condition {sv[0] / max(sv[-1], 1e-300):.2e} exceeds {_COND_LIMIT:.0e}")
    resid = Y - Z @ beta
    dof = Z.shape[0] - Z.shape[1]
    sigma = resid.T @ resid / dof
    coeffs = np.stack([beta[(l - 1) * K : l * K, :].T for l in range(1, p + 1)])
    return VarModel(p=p, coeffs=coeffs, sigma=sigma, residuals=resid, n_eff=Z.shape[0])


class LaggedGram:
    """Gram-matrix view of the full lagged design at a fixed alignment.

    Holds Z'Z, Z'Y and the response norms so that forward selections and
    small refits are solved without touching the raw rows again, and so
    that replacing one channel (surrogate testing) costs one thin matrix
    product instead of a full refit.
    """

    def __init__(self, data: np.ndarray, p_max: int):
        n, K = data.shape
        if n - p_max <= 10:
            raise SeriesTooShort(f"series too short for p_max={p_max}")
        self.K = K
        self.p_max = p_max
        rows = n - p_max
        Z = np.empty((rows, K * p_max))
        for l in range(1, p_max + 1):
            Z[:, (l - 1) * K : l * K] = data[p_max - l : n - l]
        self.Z = Z
        self.Y = data[p_max:].copy()
        self.G = Z.T @ Z
        self.B = Z.T @ self.Y
        self.YY = self.Y.T @ self.Y
        self.yy = np.diag(self.YY).copy()
        self.n_eff = rows

    def col(self, channel: int, lag: int) -> int:
        return (lag - 1) * self.K + channel

    def replace_channel(self, channel: int, series: np.ndarray) -> "LaggedGram":
        """Copy of this Gram with one channel's lags and response swapped."""
        new = object.__new__(LaggedGram)
        new.K, new.p_max, new.n_eff = self.K, self.p_max, self.n_eff
        n = series.shape[0]
        cols = [self.col(channel, l) for l in range(1, self.p_max + 1)]
        Z = self.Z.copy()
        for l, c in zip(range(1, self.p_max + 1), cols):
            Z[:, c] = series[self.p_max - l : n - l]
        Y = self.Y.copy()
        Y[:, channel] = series[self.p_max :]
        new.Z, new.Y = Z, Y
        G = self.G.copy()
        sub = Z.T @ Z[:, cols]
        G[:, cols] = sub
        G[cols, :] = sub.T
        new.G = G
        B = self.B.copy()
        B[cols, :] = Z[:, cols].T @ Y
        B[:, channel] = Z.T @ Y[:, channel]
        new.B = B
        YY = self.YY.copy()
        cross = Y.T @ Y[:, channel]
        YY[:, channel] = cross
        YY[channel, :] = cross
        new.YY = YY
        new.yy = np.diag(YY).copy()
        return new

    # -- solving on subsets of columns ------------------------------------

    def rss(self, cols: list[int], response: int) -> float:
        """Residual sum of squares of the OLS fit on the given columns."""
        if not cols:
            return float(self.yy[response])
        Gs = self.G[np.ix_(cols, cols)]
        bs = self.B[cols, response]
        try:
            L = np.linalg.cholesky(Gs)
        except np.linalg.LinAlgError as exc:
            raise IllConditioned("collinear regressor subset") from exc
        w = np.linalg.solve(L, bs)
        return float(self.yy[response] - w @ w)

    def solve(self, cols: list[int], response: int) -> np.ndarray:
        """OLS coefficients of the fit on the given columns."""
        if not cols:
            return np.empty(0)
        Gs = self.G[np.ix_(cols, cols)]
        bs = self.B[cols, response]
        return np.linalg.solve(Gs, bs)


def fit_var_from_gram(gram: LaggedGram) -> VarModel:
    """Full VAR(p_max) solved from the cached Gram blocks (no residual rows)."""
    m = gram.K * gram.p_max
    dof = gram.n_eff - m
    if dof <= 0:
        raise SeriesTooShort("no residual degrees of freedom at this order")
    try:
        beta = np.linalg.solve(gram.G, gram.B)
    except np.linalg.LinAlgError as exc:
        raise IllConditioned("normal equations are singular") from exc
    sigma = (gram.YY - gram.B.T @ beta) / dof
    sigma = 0.5 * (sigma + sigma.T)
    K = gram.K
    coeffs = np.stack([beta[(l - 1) * K : l * K, :].T for l in range(1, gram.p_max + 1)])
    return VarModel(p=gram.p_max, coeffs=coeffs, sigma=sigma, residuals=None, n_eff=gram.n_eff)


def _forward_bic(gram: LaggedGram, response: int) -> tuple[list[tuple[int, int]], float]:
    """Grow one equation's lag set greedily under BIC.

    Every not-yet-selected (channel, lag) term up to p_max is a candidate
    at every step; the candidate with the lowest penalized criterion
    n*ln(RSS/n) + 2.5*q*ln(n) wins (ties resolved by channel order, then
    lag order), and selection stops when no candidate lowers it. The
    inflated per-term penalty keeps deep proxy lags of smooth oscillatory
    channels out of the equation. Returns the ordered terms and the final
    RSS.
    """
    K, p_max, n = gram.K, gram.p_max, gram.n_eff
    if forward_bic_path is not None:
        cols_sel, rss_final = forward_bic_path(
            gram.G, gram.B[:, response], float(gram.yy[response]), n, K, p_max,
            penalty=_BIC_PENALTY,
        )
        return [(int(c) % K, int(c) // K + 1) for c in cols_sel], rss_final
    # candidate columns sorted by (channel, lag) so argmin tie-breaks right
    cand_cols = np.array([gram.col(i, l) for i in range(K) for l in range(1, p_max + 1)])
    alive = np.ones(cand_cols.size, dtype=bool)
    selected: list[tuple[int, int]] = []
    cols: list[int] = []
    rss = float(gram.yy[response])
    bic = n * np.log(rss / n)
    logn = np.log(n)
    L: np.ndarray | None = None  # cholesky of G[cols, cols]

    while alive.any():
        ccols = cand_cols[alive]
        g_cc = gram.G[ccols, ccols]
        b_c = gram.B[ccols, response]
        if cols:
            Gsc = gram.G[np.ix_(cols, ccols)]
            V = solve_triangular(L, Gsc, lower=True)
            w = solve_triangular(L, gram.B[cols, response], lower=True)
            schur = g_cc - np.einsum("ij,ij->j", V, V)
            num = b_c - V.T @ w
        else:
            schur = g_cc.astype(float)
            num = b_c.astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(schur > 1e-10 * np.maximum(g_cc, 1.0), num**2 / schur, -np.inf)
        rss_new = rss - gain
        bic_new = n * np.log(np.maximum(rss_new, 1e-300) / n) + (len(cols) + 1) * _BIC_PENALTY * logn
        best = int(np.argmin(bic_new))
        if not np.isfinite(bic_new[best]) or bic_new[best] >= bic:
            break
        chosen = int(ccols[best])
        selected.append((chosen % K, chosen // K + 1))
        cols.append(chosen)
        rss = float(rss_new[best])
        bic = float(bic_new[best])
        alive[np.flatnonzero(alive)[best]] = False
        L = np.linalg.cholesky(gram.G[np.ix_(cols, cols)])
    return selected, rss


def fit_restricted_var(ts: TimeSeriesSet, p_max: int, gram: LaggedGram | None = None) -> RestrictedVarModel:
    """Forward-BIC sparse VAR: an independent lag selection per equation.

    All equations share one row alignment (times p_max .. n-1) so BIC
    values and residual variances are comparable across steps and
    equations. An empty selection is legal and leaves that equation as
    pure noise.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    g = gram if gram is not None else LaggedGram(ts.data, p_max)
    terms = []
    coeffs = []
    resid_var = np.empty(g.K)
    for j in range(g.K):
        sel, rss = _forward_bic(g, j)
        cols = [g.col(i, l) for i, l in sel]
        terms.append(LagSet(tuple(sel)))
        coeffs.append(g.solve(cols, j))
        resid_var[j] = rss / g.n_eff
    return RestrictedVarModel(
        p_max=p_max, terms=tuple(terms), coeffs=tuple(coeffs), resid_var=resid_var, n_eff=g.n_eff
    )


def spectral_transforms(
    model: VarModel | RestrictedVarModel, F: int = 128, check_stability: bool = True
) -> SpectralModel:
    """Evaluate Abar(f) = I - sum A_k exp(-i 2 pi f k), its inverse and the
    spectral matrix on F equally spaced frequencies in (0, 0.5]."""
    if isinstance(model, RestrictedVarModel):
        coeffs = model.coefficient_stack()
        sigma = model.sigma_matrix()
    else:
        coeffs = model.coeffs
        sigma = model.sigma
    p, K, _ = coeffs.shape
    if check_stability and companion_spectral_radius(coeffs) >= 1.0:
        warnings.warn("coefficient stack is not stable; spectra may be unreliable", stacklevel=2)
    freqs = 0.5 * np.arange(1, F + 1) / F
    phases = np.exp(-2j * np.pi * np.outer(freqs, np.arange(1, p + 1)))  # (F, p)
    abar = np.tile(np.eye(K, dtype=complex), (F, 1, 1))
    abar -= np.einsum("fk,kij->fij", phases, coeffs)
    return SpectralModel(freqs=freqs, abar=abar, sigma=sigma)


def is_stable(model: VarModel) -> bool:
    """Companion spectral radius below one."""
    return model.is_stable()
