"""Synthetic coupled systems with known ground-truth coupling networks.

Four generator families are provided: coupled chaotic maps on a chain,
coupled delay-feedback oscillators, a stochastic neural-mass model producing
EEG-like output, and a sparse random vector-autoregressive process. Every
generator is a pure function of its parameters and seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import TimeSeriesSet
from .errors import KTooSmall, NumericBlowup, PersistentDivergence
from .varmodel import companion_spectral_radius


@dataclass(frozen=True)
class CouplingGraph:
    """Binary ground-truth adjacency: entry (i, j) = 1 iff node i drives node j."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=np.int8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency diagonal must be zero")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0/1")
        a.flags.writeable = False
        object.__setattr__(self, "adjacency", a)

    @property
    def K(self) -> int:
        return self.adjacency.shape[0]

    @property
    def density(self) -> int:
        """Number of directed connections."""
        return int(self.adjacency.sum())


def chain_coupling(K: int) -> CouplingGraph:
    """Bidirectional-neighbor chain: each interior node is driven by both
    neighbors, the two chain ends drive but are not driven. Density 2(K-2).
    """
    if K < 3:
        raise KTooSmall(f"chain coupling needs K >= 3, got {K}")
    a = np.zeros((K, K), dtype=np.int8)
    for j in range(1, K - 1):
        a[j - 1, j] = 1
        a[j + 1, j] = 1
    return CouplingGraph(a)


# ---------------------------------------------------------------------------
# S1: coupled Henon maps

_HENON_TRANSIENT = 100
_HENON_DIVERGE = 10.0
_HENON_RETRIES = 20


def gen_henon(K: int, C: float, n: int, seed: int) -> tuple[TimeSeriesSet, CouplingGraph]:
    """Chain of Henon maps; interior map i is driven by maps i-1 and i+1.

    x_{i,t} = 1.4 - u^2 + 0.3 x_{i,t-2} with
    u = 0.5 C (x_{i-1,t-1} + x_{i+1,t-1}) + (1-C) x_{i,t-1} for interior i
    and u = x_{i,t-1} at the two ends.
    """
    if not 0.0 <= C <= 0.5:
        raise ValueError(f"coupling strength must be in [0, 0.5], got {C}")
    graph = chain_coupling(K)
    rng = np.random.default_rng(seed)
    total = n + _HENON_TRANSIENT
    for _ in range(_HENON_RETRIES):
        x = np.empty((total + 2, K))
        x[0] = rng.uniform(0.0, 1.0, size=K)
        x[1] = rng.uniform(0.0, 1.0, size=K)
        ok = True
        for t in range(2, total + 2):
            prev = x[t - 1]
            u = prev.copy()
            if C > 0.0:
                u[1:-1] = 0.5 * C * (prev[:-2] + prev[2:]) + (1.0 - C) * prev[1:-1]
            x[t] = 1.4 - u**2 + 0.3 * x[t - 2]
            if np.max(np.abs(x[t])) > _HENON_DIVERGE:
                ok = False
                break
        if ok:
            return TimeSeriesSet(x[2 + _HENON_TRANSIENT :]), graph
    raise PersistentDivergence(f"map diverged in {_HENON_RETRIES} consecutive attempts")


# ---------------------------------------------------------------------------
# S2: coupled delay-feedback (Mackey-Glass) oscillators

_MG_STEP = 0.1  # integration step, time units
_MG_SAMPLE_EVERY = 10.0  # output sampling interval, time units
_MG_RETRIES = 5


def _mg_rhs(x: np.ndarray, xd: np.ndarray, coupling: np.ndarray) -> np.ndarray:
    return -0.1 * x + coupling.T @ (xd / (1.0 + xd**10))


def gen_mackey_glass(
    K: int, C: float, delay: float, n: int, seed: int
) -> tuple[TimeSeriesSet, CouplingGraph]:
    """Chain-coupled delay-feedback oscillators.

    dx_j/dt = -0.1 x_j + sum_i C_ij x_i(t - delay) / (1 + x_i(t - delay)^10)
    with self-feedback C_jj = 0.2 and C_ij = C on chain connections.
    """
    if C < 0:
        raise ValueError("coupling strength must be >= 0")
    graph = chain_coupling(K)
    coupling = graph.adjacency.astype(float) * C
    np.fill_diagonal(coupling, 0.2)
    return TimeSeriesSet(integrate_mackey_glass(coupling, delay, n, seed)), graph


def integrate_mackey_glass(coupling: np.ndarray, delay: float, n: int, seed: int) -> np.ndarray:
    """Integrate the delay-feedback system for an arbitrary coupling matrix.

    Fixed-step RK4; the delayed state is linearly interpolated from a ring
    buffer of past steps. A transient of 10*delay time units is discarded
    and the output is sampled every 10 time units, placing the feedback
    delay within the lag range of the autoregressive measures.
    """
    coupling = np.asarray(coupling, dtype=float)
    K = coupling.shape[0]
    h = _MG_STEP
    lag_steps = int(round(delay / h))
    stride = _MG_SAMPLE_EVERY / h
    transient_steps = int(round(10 * delay / h))
    total_steps = transient_steps + int(np.ceil((n - 1) * stride)) + 2

    rng = np.random.default_rng(seed)
    for _ in range(_MG_RETRIES):
        # history over [t - delay, t] at step resolution: a distinct constant
        # level per channel (so uncoupled channels desynchronize immediately)
        # plus small roughness
        buf = np.empty((total_steps + lag_steps + 1, K))
        level = 0.5 + rng.uniform(-0.3, 0.3, size=K)
        buf[: lag_steps + 1] = level + 0.01 * rng.standard_normal((lag_steps + 1, K))

        def delayed(idx_float: float) -> np.ndarray:
            # linear interpolation between adjacent stored steps
            lo = int(np.floor(idx_float))
            frac = idx_float - lo
            if frac == 0.0:
                return buf[lo]
            return (1.0 - frac) * buf[lo] + frac * buf[lo + 1]

        ok = True
        for s in range(total_steps):
            t = lag_steps + s
            x = buf[t]
            # delayed indices for RK4 stages at t, t+h/2, t+h
            xd0 = buf[t - lag_steps]
            xdh = delayed(t + 0.5 - lag_steps)
            xd1 = buf[t + 1 - lag_steps]
            k1 = _mg_rhs(x, xd0, coupling)
            k2 = _mg_rhs(x + 0.5 * h * k1, xdh, coupling)
            k3 = _mg_rhs(x + 0.5 * h * k2, xdh, coupling)
            k4 = _mg_rhs(x + h * k3, xd1, coupling)
            nxt = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.isfinite(nxt).all() or np.max(np.abs(nxt)) > 1e3:
                ok = False
                break
            buf[t + 1] = nxt
        if ok:
            base = lag_steps + transient_steps
            idx = base + np.round(np.arange(n) * stride).astype(int)
            return buf[idx]
    raise NumericBlowup(f"integration overflowed in {_MG_RETRIES} attempts")


# ---------------------------------------------------------------------------
# S3: coupled stochastic neural-mass model

@dataclass(frozen=True)
class NeuralMassParams:
    """Rate constants and sigmoid parameters of one neural-mass subsystem.

    The noise-drive values p_mean/p_std put the uncoupled subsystem just
    below its oscillatory regime at A = 3.45 (noise-like output) and inside
    the slow spiking regime at A = 3.7.
    """

    A: float = 3.45  # excitation, mV
    B: float = 22.0  # inhibition, mV
    a: float = 100.0  # 1/s
    b: float = 50.0  # 1/s
    a_d: float = 33.0  # 1/s
    C1: float = 135.0
    C2: float = 0.8 * 135.0
    C3: float = 0.25 * 135.0
    C4: float = 0.25 * 135.0
    e0: float = 2.5  # 1/s
    v0: float = 6.0  # mV
    r: float = 0.56  # 1/mV
    p_mean: float = 90.0  # 1/s
    p_std: float = 30.0  # 1/s

    def __post_init__(self):
        for name in ("A", "B", "a", "b", "a_d", "C1", "C2", "C3", "C4", "e0", "r", "p_std"):
            if getattr(self, name) <= 0:
                raise ValueError(f"parameter {name} must be positive")

    def sigmoid(self, v: np.ndarray) -> np.ndarray:
        return 2.0 * self.e0 / (1.0 + np.exp(self.r * (self.v0 - v)))


_NM_STEP = 1e-3  # s
_NM_OUTPUT_HZ = 256.0
_NM_TRANSIENT = 2.0  # s
_NM_RETRIES = 3


def gen_neural_mass(
    K: int,
    C: float,
    n: int,
    seed: int,
    params: NeuralMassParams | None = None,
) -> tuple[TimeSeriesSet, CouplingGraph]:
    """Chain-coupled neural-mass subsystems driven by independent noise.

    Each subsystem carries eight state variables; subsystem j receives the
    delayed-population outputs y6 of its chain neighbors scaled by C. Only
    y0 of each subsystem is observed, sampled at 256 Hz after a discarded
    transient. The stochastic input p is redrawn independently per channel
    at every explicit Euler step.
    """
    if C < 0:
        raise ValueError("coupling strength must be >= 0")
    pr = params or NeuralMassParams()
    graph = chain_coupling(K)
    coupling = graph.adjacency.astype(float) * C

    h = _NM_STEP
    steps_per_sample = 1.0 / (_NM_OUTPUT_HZ * h)
    transient_steps = int(round(_NM_TRANSIENT / h))
    total_steps = transient_steps + int(np.ceil((n - 1) * steps_per_sample)) + 2

    rng = np.random.default_rng(seed)
    for attempt in range(_NM_RETRIES):
        y = np.zeros((8, K))  # rows: y0, y1, y2, y3, y4, y5, y6, y7
        out = np.empty((total_steps + 1, K))
        out[0] = y[0]
        ok = True
        for s in range(total_steps):
            y0, y1, y2, y3, y4, y5, y6, y7 = y
            p = pr.p_mean + pr.p_std * rng.standard_normal(K)
            sig_pyr = pr.sigmoid(y1 - y2)
            drive = p + pr.C2 * pr.sigmoid(pr.C1 * y0) + coupling.T @ y6
            dy = np.empty_like(y)
            dy[0] = y3
            dy[3] = pr.A * pr.a * sig_pyr - 2 * pr.a * y3 - pr.a**2 * y0
            dy[1] = y4
            dy[4] = pr.A * pr.a * drive - 2 * pr.a * y4 - pr.a**2 * y1
            dy[2] = y5
            dy[5] = pr.B * pr.b * pr.C4 * pr.sigmoid(pr.C3 * y0) - 2 * pr.b * y5 - pr.b**2 * y2
            dy[6] = y7
            dy[7] = pr.A * pr.a_d * sig_pyr - 2 * pr.a_d * y7 - pr.a_d**2 * y6
            y = y + h * dy
            if not np.isfinite(y).all() or np.max(np.abs(y)) > 1e7:
                ok = False
                break
            out[s + 1] = y[0]
        if ok:
            idx = transient_steps + np.round(np.arange(n) * steps_per_sample).astype(int)
            return TimeSeriesSet(out[idx]), graph
        h /= 2.0
        steps_per_sample = 1.0 / (_NM_OUTPUT_HZ * h)
        transient_steps = int(round(_NM_TRANSIENT / h))
        total_steps = transient_steps + int(np.ceil((n - 1) * steps_per_sample)) + 2
    raise NumericBlowup(f"integration blew up in {_NM_RETRIES} attempts")


# ---------------------------------------------------------------------------
# S4: sparse random VAR process

@dataclass(frozen=True)
class SparseVarSpec:
    """Construction recipe for the sparse random VAR system."""

    K: int = 25
    order: int = 3
    active_fraction: float = 0.04
    magnitude: float = 0.9
    seed: int = 0
    shrink: float = 0.98

    def __post_init__(self):
        if not 0.0 < self.active_fraction < 1.0:
            raise ValueError("active_fraction must be in (0, 1)")
        if self.K < 2 or self.order < 1:
            raise ValueError("need K >= 2 and order >= 1")


def sparse_var_coefficients(spec: SparseVarSpec) -> np.ndarray:
    """Draw the sparse coefficient stack and shrink it until stationary.

    Coefficient (k, j, i) multiplies channel i at lag k+1 in channel j's
    equation. A random fraction of all slots is set to `magnitude`, the
    lag-one diagonal to one, then every nonzero entry is scaled down
    geometrically until the companion spectral radius drops below one.
    """
    rng = np.random.default_rng(spec.seed)
    K, p = spec.K, spec.order
    slots = K * K * p
    coeffs = np.zeros(slots)
    active = rng.choice(slots, size=int(round(spec.active_fraction * slots)), replace=False)
    coeffs[active] = spec.magnitude
    coeffs = coeffs.reshape(p, K, K)
    coeffs[0][np.diag_indices(K)] = 1.0
    while companion_spectral_radius(coeffs) >= 1.0:
        coeffs *= spec.shrink
    return coeffs


def gen_sparse_var(
    spec: SparseVarSpec, n: int = 512, seed: int = 0
) -> tuple[TimeSeriesSet, CouplingGraph, np.ndarray]:
    """Simulate the sparse VAR with unit-variance innovations.

    The coefficient draw is fixed by spec.seed so repeated calls with
    different `seed` values produce realizations of one and the same
    process. Returns the series, the ground-truth graph (edge i -> j iff
    any lag of channel i appears in channel j's equation) and the
    coefficient stack.
    """
    coeffs = sparse_var_coefficients(spec)
    K, p = spec.K, spec.order
    adj = (np.abs(coeffs).sum(axis=0).T > 0).astype(np.int8)
    np.fill_diagonal(adj, 0)
    graph = CouplingGraph(adj)

    rng = np.random.default_rng(seed)
    transient = 200
    x = np.zeros((n + transient + p, K))
    innov = rng.standard_normal((n + transient + p, K))
    for t in range(p, n + transient + p):
        acc = innov[t].copy()
        for k in range(p):
            acc += coeffs[k] @ x[t - 1 - k]
        x[t] = acc
    return TimeSeriesSet(x[p + transient :]), graph, coeffs
