"""Measure registry: spec strings, matrix drivers and pairwise evaluators.

A measure spec looks like ``te(m=2,tau=1)`` or ``rgpdc(p=3,band=alpha)``;
names are case-insensitive. ``compute_matrix`` produces the full directed
matrix; ``make_pair_evaluator`` returns a callable for surrogate testing
that may assume any series it is handed differs from the base series in
the driver channel only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import CausalityMatrix, EmbeddingSpec, TimeSeriesSet
from ..varmodel import LaggedGram, fit_restricted_var, fit_var_from_gram, spectral_transforms
from . import frequency, information, linear
from .frequency import BANDS, BandSpec

_LINEAR = ("gci", "cgci", "pgci", "rcgci")
_SPECTRAL = ("pdc", "gpdc", "dtf", "ddtf")
_INFO_KNN = ("te", "pte")
_SYMBOLIC = ("ste", "pste", "terv", "pterv")

KNOWN_MEASURES = _LINEAR + _SPECTRAL + ("ggc", "rgpdc") + _INFO_KNN + _SYMBOLIC + ("pmime",)


@dataclass(frozen=True)
class MeasureSpec:
    """A measure name with its parameter record."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        name = self.name.lower()
        if name not in KNOWN_MEASURES:
            raise ValueError(f"unknown measure {self.name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", {str(k).lower(): v for k, v in self.params.items()})

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})" if inner else self.name

    @property
    def family(self) -> str:
        """Measure name plus non-band parameters; used for best-of-family reports."""
        return self.name


def parse_measure(text: str) -> MeasureSpec:
    """Parse ``name(key=value,...)`` with bare band names allowed, e.g.
    ``pdc(p=5,band=alpha)`` or ``pdc(p=5,alpha)``."""
    text = text.strip()
    if "(" not in text:
        return MeasureSpec(text, {})
    if not text.endswith(")"):
        raise ValueError(f"malformed measure spec {text!r}")
    name, inner = text[:-1].split("(", 1)
    params: dict = {}
    for item in filter(None, (s.strip() for s in inner.split(","))):
        if "=" in item:
            key, val = (s.strip() for s in item.split("=", 1))
        elif item.lower() in BANDS:
            key, val = "band", item
        else:
            raise ValueError(f"bad parameter {item!r} in {text!r}")
        key = key.lower()
        if key == "band":
            params[key] = val.lower()
        else:
            try:
                params[key] = int(val)
            except ValueError:
                params[key] = float(val)
    return MeasureSpec(name, params)


def _band(spec: MeasureSpec) -> BandSpec:
    name = spec.params.get("band", "alpha")
    try:
        return BANDS[name]
    except KeyError:
        raise ValueError(f"unknown band {name!r}") from None


def _embedding(spec: MeasureSpec) -> EmbeddingSpec:
    return EmbeddingSpec(m=int(spec.params["m"]), tau=int(spec.params.get("tau", 1)))


def _pte_conditioning(ts: TimeSeriesSet, i: int, j: int) -> tuple[int, ...]:
    """All remaining channels for small systems, the three most relevant
    (by mutual information with the driver) for large ones."""
    others = [v for v in range(ts.K) if v not in (i, j)]
    if len(others) <= 3:
        return tuple(others)
    return information.select_conditioning(ts, i, j, count=3)


def compute_matrix(ts: TimeSeriesSet, spec: MeasureSpec, F: int = 128) -> CausalityMatrix:
    """Evaluate the measure on every ordered pair of channels."""
    name, p = spec.name, spec.params
    if name == "gci":
        return linear.gci_matrix(ts, int(p["p"]))
    if name == "cgci":
        return linear.cgci_matrix(ts, int(p["p"]))
    if name == "pgci":
        return linear.pgci_matrix(ts, int(p["p"]))
    if name == "rcgci":
        return linear.rcgci_matrix(ts, int(p["p"]))
    if name in _SPECTRAL:
        return frequency.spectral_matrix(ts, name, int(p["p"]), _band(spec), F=F)
    if name == "ggc":
        return frequency.ggc_matrix(ts, int(p["p"]), _band(spec), F=F)
    if name == "rgpdc":
        return frequency.rgpdc_matrix(ts, int(p["p"]), _band(spec), F=F)
    if name == "pmime":
        cfg = information.KnnConfig(k=int(p.get("k", 10)))
        return information.pmime(ts, int(p["l"]), cfg, float(p.get("a_stop", 0.97)))
    emb = _embedding(spec)
    cfg = information.KnnConfig(k=int(p.get("k", 10)))
    K = ts.K
    vals = np.zeros((K, K))
    for j in range(K):
        for i in range(K):
            if i == j:
                continue
            if name == "te":
                vals[i, j] = information.te(ts, i, j, emb, cfg)
            elif name == "pte":
                vals[i, j] = information.pte(ts, i, j, emb, cfg, _pte_conditioning(ts, i, j))
            elif name in ("ste", "terv"):
                vals[i, j] = information.symbolic_te(ts, i, j, emb, name)
            else:  # pste, pterv
                variant = "ste" if name == "pste" else "terv"
                vals[i, j] = information.symbolic_te(
                    ts, i, j, emb, variant, _pte_conditioning(ts, i, j)
                )
    return CausalityMatrix(vals, name, dict(spec.params))


def make_pair_evaluator(spec: MeasureSpec, base: TimeSeriesSet, F: int = 128):
    """Callable (ts, i, j) -> float for surrogate testing.

    The callable may assume ts is either the base series itself or a copy
    differing only in the driver channel i, which lets VAR-backed measures
    reuse one Gram decomposition across all surrogate replicas.
    """
    name, p = spec.name, spec.params

    if name in _LINEAR + _SPECTRAL + ("rgpdc",):
        p_order = int(p["p"])
        base_gram = LaggedGram(base.data, p_order)

        def gram_for(ts: TimeSeriesSet, i: int) -> LaggedGram:
            if ts is base:
                return base_gram
            return base_gram.replace_channel(i, ts.data[:, i])

        if name == "gci":
            return lambda ts, i, j: linear.gci(ts, i, j, p_order, gram=gram_for(ts, i))
        if name == "cgci":
            return lambda ts, i, j: linear.cgci(ts, i, j, p_order, gram=gram_for(ts, i))
        if name == "pgci":
            return lambda ts, i, j: linear.pgci(ts, i, j, p_order, gram=gram_for(ts, i))
        if name == "rcgci":
            return lambda ts, i, j: linear.rcgci_pair(ts, i, j, p_order, gram=gram_for(ts, i))
        band = _band(spec)
        if name == "rgpdc":

            def eval_rgpdc(ts: TimeSeriesSet, i: int, j: int) -> float:
                model = fit_restricted_var(ts, p_order, gram=gram_for(ts, i))
                return frequency.gpdc_band_pair(
                    model.coefficient_stack(), model.resid_var, i, j, band, F=F
                )

            return eval_rgpdc

        def eval_spectral(ts: TimeSeriesSet, i: int, j: int) -> float:
            model = fit_var_from_gram(gram_for(ts, i))
            sm = spectral_transforms(model, F=F, check_stability=False)
            vals = frequency.spectral_measure(sm, name, i, j)
            return frequency.band_aggregate(vals, band, sm.freqs)

        return eval_spectral

    if name == "ggc":
        band = _band(spec)
        p_order = int(p["p"])

        def eval_ggc(ts: TimeSeriesSet, i: int, j: int) -> float:
            vals = frequency.ggc_pair(ts, i, j, p_order, F=F)
            freqs = 0.5 * np.arange(1, F + 1) / F
            return frequency.band_aggregate(vals, band, freqs)

        return eval_ggc

    if name in _INFO_KNN + _SYMBOLIC:
        emb = _embedding(spec)
        cfg = information.KnnConfig(k=int(p.get("k", 10)))
        if name == "te":
            return lambda ts, i, j: information.te(ts, i, j, emb, cfg)
        if name in ("ste", "terv"):
            return lambda ts, i, j: information.symbolic_te(ts, i, j, emb, name)

        cond_cache: dict[tuple[int, int], tuple[int, ...]] = {}

        def conditioning(i: int, j: int) -> tuple[int, ...]:
            if (i, j) not in cond_cache:
                cond_cache[(i, j)] = _pte_conditioning(base, i, j)
            return cond_cache[(i, j)]

        if name == "pte":
            return lambda ts, i, j: information.pte(ts, i, j, emb, cfg, conditioning(i, j))
        variant = "ste" if name == "pste" else "terv"
        return lambda ts, i, j: information.symbolic_te(ts, i, j, emb, variant, conditioning(i, j))

    raise ValueError(f"measure {spec.label} has no surrogate-test evaluator")
