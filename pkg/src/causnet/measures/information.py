"""Nearest-neighbor and symbolic information-flow measures.

The continuous estimators follow the digamma/neighbor-counting scheme in
the max norm: the k-th-neighbor radius is found in the joint space and
points are counted strictly inside that radius in the marginal spaces. A
deterministic sub-resolution jitter breaks distance ties on map-like data,
so every estimate is a pure function of its input arrays.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma

from .._kernels import conditioned_counts, count_within_radius, kth_neighbor_distance
from ..core import CausalityMatrix, EmbeddingSpec, LagSet, TimeSeriesSet, delay_embed
from ..errors import TooFewSamples

_JITTER_SEED = 0x5EED
_JITTER_SCALE = 1e-10
_MIN_SAMPLES = 50


class TooFewSamplesWarning(UserWarning):
    """Symbol histograms are too sparse for a trustworthy plug-in estimate."""


@dataclass(frozen=True)
class KnnConfig:
    """Neighbor count for the continuous estimators (max-norm metric)."""

    k: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class MixedEmbedding:
    """Greedily selected lag terms for one response, with the joint
    information recorded after each accepted term."""

    selected: LagSet
    gains: tuple[float, ...] = field(default_factory=tuple)


def _as_2d(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, 1) if a.ndim == 1 else a


def _jittered(parts: list[np.ndarray]) -> np.ndarray:
    joint = np.column_stack(parts)
    rng = np.random.default_rng(_JITTER_SEED)
    return joint + _JITTER_SCALE * rng.standard_normal(joint.shape)


def _count_1d(col: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Strict 1-d neighbor count via a sorted projection."""
    order = np.argsort(col, kind="stable")
    s = col[order]
    lo = np.searchsorted(s, col - radii, side="right")
    hi = np.searchsorted(s, col + radii, side="left")
    return (hi - lo - 1).astype(np.int64)


def _count_sub(pts: np.ndarray, radii: np.ndarray) -> np.ndarray:
    if pts.shape[1] == 1:
        return _count_1d(pts[:, 0], radii)
    return count_within_radius(np.ascontiguousarray(pts), radii)


def knn_mi(x: np.ndarray, y: np.ndarray, cfg: KnnConfig = KnnConfig()) -> float:
    """Mutual information (nats) between two vector samples."""
    x, y = _as_2d(x), _as_2d(y)
    n = x.shape[0]
    if y.shape[0] != n:
        raise ValueError("sample counts differ")
    if n < max(_MIN_SAMPLES, cfg.k + 2):
        raise TooFewSamples(f"need at least {max(_MIN_SAMPLES, cfg.k + 2)} samples, got {n}")
    joint = _jittered([x, y])
    eps = kth_neighbor_distance(joint, cfg.k)
    dx = x.shape[1]
    n_x = _count_sub(joint[:, :dx], eps)
    n_y = _count_sub(joint[:, dx:], eps)
    return float(digamma(cfg.k) + digamma(n) - np.mean(digamma(n_x + 1) + digamma(n_y + 1)))


def knn_cmi(
    x: np.ndarray, y: np.ndarray, z: np.ndarray | None, cfg: KnnConfig = KnnConfig()
) -> float:
    """Conditional mutual information I(x; y | z) in nats.

    With an empty conditioning block this is exactly knn_mi.
    """
    x, y = _as_2d(x), _as_2d(y)
    if z is None:
        return knn_mi(x, y, cfg)
    z = _as_2d(z)
    if z.shape[1] == 0:
        return knn_mi(x, y, cfg)
    n = x.shape[0]
    if y.shape[0] != n or z.shape[0] != n:
        raise ValueError("sample counts differ")
    if n < max(_MIN_SAMPLES, cfg.k + 2):
        raise TooFewSamples(f"need at least {max(_MIN_SAMPLES, cfg.k + 2)} samples, got {n}")
    joint = _jittered([x, y, z])
    eps = kth_neighbor_distance(joint, cfg.k)
    n_xz, n_yz, n_z = conditioned_counts(joint, x.shape[1], y.shape[1], eps)
    return float(digamma(cfg.k) - np.mean(digamma(n_xz + 1) + digamma(n_yz + 1) - digamma(n_z + 1)))


# ---------------------------------------------------------------------------
# transfer-entropy family (continuous estimators)

def _te_blocks(
    ts: TimeSeriesSet, i: int, j: int, spec: EmbeddingSpec, conditioning: tuple[int, ...] = ()
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Aligned (future, driver embedding, conditioning embeddings) blocks.

    Rows correspond to times t = (m-1)tau .. n-2; the future column is the
    response at t+1 and every embedding is evaluated at t.
    """
    if i == j:
        raise ValueError("driver and response must differ")
    x_emb = delay_embed(ts.channel(i), spec)[:-1]
    y_emb = delay_embed(ts.channel(j), spec)[:-1]
    future = ts.channel(j)[spec.window() :]
    cond = [y_emb] + [delay_embed(ts.channel(c), spec)[:-1] for c in conditioning]
    return future.reshape(-1, 1), x_emb, np.column_stack(cond)


def te(
    ts: TimeSeriesSet, i: int, j: int, spec: EmbeddingSpec, cfg: KnnConfig = KnnConfig()
) -> float:
    """Information the driver's recent past adds about the response's next
    sample beyond the response's own past."""
    future, x_emb, y_emb = _te_blocks(ts, i, j, spec)
    return knn_cmi(future, x_emb, y_emb, cfg)


def pte(
    ts: TimeSeriesSet,
    i: int,
    j: int,
    spec: EmbeddingSpec,
    cfg: KnnConfig = KnnConfig(),
    conditioning: tuple[int, ...] = (),
) -> float:
    """Transfer entropy conditioned additionally on other channels' pasts."""
    if i in conditioning or j in conditioning:
        raise ValueError("conditioning set must exclude driver and response")
    future, x_emb, z = _te_blocks(ts, i, j, spec, conditioning=tuple(conditioning))
    return knn_cmi(future, x_emb, z, cfg)


def select_conditioning(
    ts: TimeSeriesSet, i: int, j: int, count: int = 3, cfg: KnnConfig = KnnConfig()
) -> tuple[int, ...]:
    """The `count` channels most informative about the driver.

    Ranking is by mutual information with the driver channel; ties resolve
    to the lower channel index. Returns all remaining channels when no more
    than `count` are available.
    """
    others = [v for v in range(ts.K) if v not in (i, j)]
    if len(others) <= count:
        return tuple(others)
    x = ts.channel(i)
    scores = np.array([knn_mi(x, ts.channel(v), cfg) for v in others])
    order = np.argsort(-scores, kind="stable")
    return tuple(others[q] for q in order[:count])


# ---------------------------------------------------------------------------
# symbolic (rank-pattern) estimators

def _rank_patterns(emb: np.ndarray) -> np.ndarray:
    """Encode each embedding row as its rank-order pattern id.

    Rows hold (x_t, x_{t-tau}, ..., x_{t-(m-1)tau}); ranks are assigned on
    the time-ordered window with ties going to the earlier sample.
    """
    u = emb[:, ::-1]  # time-ordered: earliest first
    m = u.shape[1]
    # stable argsort ranks equal values by position, i.e. earlier-first
    order = np.argsort(u, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(u.shape[0])[:, None]
    ranks[rows, order] = np.arange(m)[None, :]
    return (ranks * (m + 1) ** np.arange(m)[None, :]).sum(axis=1)


def _rank_of_future(emb: np.ndarray, future: np.ndarray) -> np.ndarray:
    """Rank of the next sample within its extended (m+1)-sample window.

    The window is the time-ordered embedding plus the future sample at the
    end; rank counts how many window entries are strictly smaller, plus the
    ties that occurred earlier in time (all of them, as the future sample
    is the latest)."""
    u = emb[:, ::-1]
    smaller = (u < future[:, None]).sum(axis=1)
    ties = (u == future[:, None]).sum(axis=1)
    return smaller + ties


def _plugin_cmi(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Exact plug-in conditional mutual information of three symbol arrays."""
    n = a.shape[0]
    abc = np.column_stack([a, b, c])
    _, inv_abc, cnt_abc = np.unique(abc, axis=0, return_inverse=True, return_counts=True)
    _, inv_ac, cnt_ac = np.unique(abc[:, [0, 2]], axis=0, return_inverse=True, return_counts=True)
    _, inv_bc, cnt_bc = np.unique(abc[:, [1, 2]], axis=0, return_inverse=True, return_counts=True)
    _, inv_c, cnt_c = np.unique(c, return_inverse=True, return_counts=True)
    p_abc = cnt_abc[inv_abc] / n
    p_ac = cnt_ac[inv_ac] / n
    p_bc = cnt_bc[inv_bc] / n
    p_c = cnt_c[inv_c] / n
    # sum over samples of (1/n) log(...) equals the cell-weighted sum
    return float(np.mean(np.log(p_abc * p_c / (p_ac * p_bc))))


def symbolic_te(
    ts: TimeSeriesSet,
    i: int,
    j: int,
    spec: EmbeddingSpec,
    variant: str = "ste",
    conditioning: tuple[int, ...] = (),
) -> float:
    """Rank-pattern transfer entropy, plug-in estimated from symbol counts.

    variant "ste" uses the response's next-step pattern as the future term;
    variant "terv" instead ranks the next sample inside the (m+1)-window
    extending the current response embedding. Conditioning channels append
    their patterns to the conditioning symbol (partial variants).
    """
    if variant.lower() not in ("ste", "terv"):
        raise ValueError(f"unknown symbolic variant {variant!r}")
    if spec.m < 2:
        raise ValueError("rank patterns need m >= 2")
    if i == j:
        raise ValueError("driver and response must differ")
    x_emb = delay_embed(ts.channel(i), spec)
    y_emb = delay_embed(ts.channel(j), spec)
    rows = x_emb.shape[0] - 1
    x_sym = _rank_patterns(x_emb[:-1])
    y_sym_now = _rank_patterns(y_emb[:-1])
    if variant.lower() == "ste":
        future = _rank_patterns(y_emb[1:])
    else:
        future = _rank_of_future(y_emb[:-1], ts.channel(j)[spec.window() :])
    cond = y_sym_now
    if conditioning:
        base = int(cond.max()) + 1
        for c in conditioning:
            c_sym = _rank_patterns(delay_embed(ts.channel(c), spec)[:-1])
            cond = cond * (int(c_sym.max()) + 1) + c_sym
    cells = len(np.unique(np.column_stack([future, x_sym, cond]), axis=0))
    if rows < 5 * cells:
        warnings.warn(
            f"only {rows} samples for {cells} occupied symbol cells",
            TooFewSamplesWarning,
            stacklevel=2,
        )
    return _plugin_cmi(future, x_sym, cond)


# ---------------------------------------------------------------------------
# mixed-embedding measure

def mixed_embedding(
    ts: TimeSeriesSet,
    response: int,
    L_max: int,
    cfg: KnnConfig = KnnConfig(),
    stop_ratio: float = 0.97,
) -> MixedEmbedding:
    """Greedy lag selection across all channels for one response.

    Candidates are all (channel, lag) terms up to L_max; each step adds the
    term with the highest conditional information about the response's next
    sample given the terms already chosen. The joint information of the
    growing set is accumulated through the chain rule
    I(y; w + c) = I(y; w) + I(y; c | w), which keeps the stopping ratio
    monotone where a fresh joint estimate would drift with dimension. The
    loop stops when the winning term contributes less than a fraction
    (1 - stop_ratio) of the accumulated information, or less than a noise
    floor of 1.1 / sqrt(samples) that absorbs the spread of the estimator
    maximum over the candidate pool (without it, a response carrying no
    information at all would collect one spurious term after another,
    since the proportional rule alone is toothless at a near-zero base).
    """
    data = ts.data
    n = ts.n
    if n - L_max < max(_MIN_SAMPLES, cfg.k + 2):
        raise TooFewSamples(f"series too short for L_max={L_max}")
    future = data[L_max:, response].reshape(-1, 1)
    floor = 1.1 / np.sqrt(n - L_max)
    pool: dict[tuple[int, int], np.ndarray] = {
        (i, l): data[L_max - l : n - l, i] for i in range(ts.K) for l in range(1, L_max + 1)
    }
    selected: list[tuple[int, int]] = []
    cols: list[np.ndarray] = []
    gains: list[float] = []
    info_old = 0.0
    while pool:
        z = np.column_stack(cols) if cols else None
        best_term, best_cmi = None, -np.inf
        for term in pool:  # insertion order: channel-major, lag-minor
            v = knn_cmi(future, pool[term], z, cfg)
            if v > best_cmi:
                best_term, best_cmi = term, v
        info_new = info_old + best_cmi
        if best_cmi < floor or info_old / info_new >= stop_ratio:
            break
        selected.append(best_term)
        cols.append(pool[best_term])
        gains.append(info_new)
        info_old = info_new
        del pool[best_term]
    return MixedEmbedding(LagSet(tuple(selected)), tuple(gains))


def pmime_response(
    ts: TimeSeriesSet,
    response: int,
    L_max: int,
    cfg: KnnConfig = KnnConfig(),
    stop_ratio: float = 0.97,
) -> np.ndarray:
    """One response's row of driver strengths from its mixed embedding.

    Entry i is the fraction of the embedding's joint information carried by
    channel i's selected lags given the rest; channels with no selected lag
    are exactly zero.
    """
    emb = mixed_embedding(ts, response, L_max, cfg, stop_ratio)
    K = ts.K
    out = np.zeros(K)
    if not len(emb.selected):
        return out
    data = ts.data
    n = ts.n
    future = data[L_max:, response].reshape(-1, 1)
    cols = {term: data[L_max - term[1] : n - term[1], term[0]] for term in emb.selected}
    all_cols = np.column_stack([cols[t] for t in emb.selected])
    total = knn_mi(future, all_cols, cfg)
    if total <= 0:
        return out
    for i in emb.selected.variables():
        if i == response:
            continue
        own = np.column_stack([cols[t] for t in emb.selected if t[0] == i])
        rest = [cols[t] for t in emb.selected if t[0] != i]
        z = np.column_stack(rest) if rest else None
        out[i] = max(knn_cmi(future, own, z, cfg), 0.0) / total
    return out


def pmime(
    ts: TimeSeriesSet,
    L_max: int,
    cfg: KnnConfig = KnnConfig(),
    stop_ratio: float = 0.97,
) -> CausalityMatrix:
    """Full matrix of mixed-embedding information fractions."""
    K = ts.K
    vals = np.zeros((K, K))
    for j in range(K):
        vals[:, j] = pmime_response(ts, j, L_max, cfg, stop_ratio)
    return CausalityMatrix(vals, "pmime", {"L": L_max})
