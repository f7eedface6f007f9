"""Benchmark orchestration: scenario sweeps, result tables and rankings.

An experiment runs a grid of (coupling strength x realization) cells for
one system, computes every configured measure's matrix per cell, applies
every configured binarization criterion, and scores the result against the
generating network. Cells are seeded independently of execution order, so
results are reproducible with any worker count.
"""
from __future__ import annotations

import configparser
import csv
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import CausalityMatrix, TimeSeriesSet, standardize
from .errors import CausnetError
from .evaluation import confusion, indices, rank_measures, score_from_ranks
from .measures import MeasureSpec, compute_matrix, make_pair_evaluator, parse_measure
from .significance import (
    AdjacencyNetwork,
    binarize_density,
    binarize_magnitude,
    binarize_positive,
    binarize_significance,
    surrogate_test,
    threshold_from_density,
)
from .systems import SparseVarSpec, gen_henon, gen_mackey_glass, gen_neural_mass, gen_sparse_var

RESULT_FIELDS = (
    "system",
    "K",
    "n",
    "param",
    "C",
    "measure",
    "criterion",
    "realization",
    "TP",
    "FP",
    "FN",
    "TN",
    "sens",
    "spec",
    "prec",
    "MCC",
    "FM",
    "HD",
    "error",
)


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    K: int
    n: int
    couplings: tuple[float, ...]
    measures: tuple[MeasureSpec, ...]
    alphas: tuple[float, ...] = (0.05,)
    density_multiples: tuple[float, ...] = ()
    magnitude_multiples: tuple[float, ...] = ()
    realizations: int = 10
    surrogates: int = 100
    seed: int = 12345
    workers: int = 1
    delay: float = 100.0  # mackey_glass
    excitation: float = 3.45  # neural_mass
    var_order: int = 3  # sparse_var
    coeff_seed: int = 0  # sparse_var coefficient draw
    outdir: str = "results"

    def __post_init__(self):
        if self.system not in ("henon", "mackey_glass", "neural_mass", "sparse_var"):
            raise ValueError(f"unknown system {self.system!r}")
        if self.realizations < 1:
            raise ValueError("need at least one realization")

    @property
    def param_label(self) -> str:
        if self.system == "mackey_glass":
            return f"delay={self.delay:g}"
        if self.system == "neural_mass":
            return f"A={self.excitation:g}"
        if self.system == "sparse_var":
            return f"P={self.var_order}"
        return ""


@dataclass(frozen=True)
class ResultRow:
    system: str
    K: int
    n: int
    param: str
    C: float
    measure: str
    criterion: str
    realization: int
    TP: int = 0
    FP: int = 0
    FN: int = 0
    TN: int = 0
    sens: float = 0.0
    spec: float = 0.0
    prec: float = 0.0
    MCC: float = 0.0
    FM: float = 0.0
    HD: int = 0
    error: str = ""

    def as_fields(self) -> list[str]:
        return [
            self.system,
            str(self.K),
            str(self.n),
            self.param,
            f"{self.C:g}",
            self.measure,
            self.criterion,
            str(self.realization),
            str(self.TP),
            str(self.FP),
            str(self.FN),
            str(self.TN),
            f"{self.sens:.6f}",
            f"{self.spec:.6f}",
            f"{self.prec:.6f}",
            f"{self.MCC:.6f}",
            f"{self.FM:.6f}",
            str(self.HD),
            self.error,
        ]


def generate_system(
    system: str,
    K: int,
    n: int,
    C: float,
    seed: int,
    delay: float = 100.0,
    excitation: float = 3.45,
    var_order: int = 3,
    coeff_seed: int = 0,
):
    """One standardized realization of a named system plus its true graph."""
    if system == "henon":
        ts, graph = gen_henon(K, C, n, seed)
    elif system == "mackey_glass":
        ts, graph = gen_mackey_glass(K, C, delay, n, seed)
    elif system == "neural_mass":
        from .systems import NeuralMassParams

        ts, graph = gen_neural_mass(K, C, n, seed, params=NeuralMassParams(A=excitation))
    elif system == "sparse_var":
        spec = SparseVarSpec(K=K, order=var_order, seed=coeff_seed)
        ts, graph, _ = gen_sparse_var(spec, n, seed)
    else:
        raise ValueError(f"unknown system {system!r}")
    return standardize(ts), graph


def _cell_seed(cfg: ExperimentConfig, scen: int, realization: int, salt: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence((cfg.seed, scen, realization, salt))


def _run_cell(args) -> tuple[int, int, dict, dict, np.ndarray]:
    """Worker unit: one (scenario, realization) cell.

    Returns measure matrices and, when significance testing is configured,
    per-pair p-value matrices keyed by measure label.
    """
    cfg, scen, C, realization = args
    data_seed = _cell_seed(cfg, scen, realization).generate_state(1)[0]
    ts, graph = generate_system(
        cfg.system,
        cfg.K,
        cfg.n,
        C,
        int(data_seed),
        delay=cfg.delay,
        excitation=cfg.excitation,
        var_order=cfg.var_order,
        coeff_seed=cfg.coeff_seed,
    )
    matrices: dict[str, CausalityMatrix | str] = {}
    pvals: dict[str, np.ndarray] = {}
    for mi, mspec in enumerate(cfg.measures):
        try:
            matrices[mspec.label] = compute_matrix(ts, mspec)
        except CausnetError as exc:
            matrices[mspec.label] = f"{type(exc).__name__}: {exc}"
            continue
        if cfg.alphas and mspec.name != "pmime":
            evaluate = make_pair_evaluator(mspec, ts)
            pm = np.ones((ts.K, ts.K))
            surr_seed = int(_cell_seed(cfg, scen, realization, salt=1000 + mi).generate_state(1)[0])
            for i in range(ts.K):
                for j in range(ts.K):
                    if i != j:
                        res = surrogate_test(evaluate, ts, i, j, M=cfg.surrogates, seed=surr_seed)
                        pm[i, j] = res.p_value
            pvals[mspec.label] = pm
    return scen, realization, matrices, pvals, graph.adjacency


def run_experiment(cfg: ExperimentConfig, progress=None) -> list[ResultRow]:
    """Full sweep: every coupling strength, realization, measure, criterion.

    Per-cell estimator failures are recorded on their rows and do not stop
    the sweep. Rows come back in canonical order.
    """
    cells = [
        (cfg, scen, C, r)
        for scen, C in enumerate(cfg.couplings)
        for r in range(cfg.realizations)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_cell, cells))
    else:
        outcomes = []
        for cell in cells:
            outcomes.append(_run_cell(cell))
            if progress is not None:
                progress(cell)

    # organize by scenario: matrices[scen][label][realization]
    by_scen: dict[int, dict] = {}
    truth_of: dict[int, AdjacencyNetwork] = {}
    for scen, realization, matrices, pvals, adjacency in outcomes:
        truth_of[scen] = AdjacencyNetwork(adjacency, "truth")
        slot = by_scen.setdefault(scen, {"matrices": {}, "pvals": {}})
        for label, mat in matrices.items():
            slot["matrices"].setdefault(label, {})[realization] = mat
        for label, pm in pvals.items():
            slot["pvals"].setdefault(label, {})[realization] = pm

    rows: list[ResultRow] = []
    for scen, C in enumerate(cfg.couplings):
        truth = truth_of[scen]
        rho0 = max(truth.edges, 1)
        slot = by_scen[scen]
        for mspec in cfg.measures:
            label = mspec.label
            mats = slot["matrices"].get(label, {})
            good = {r: m for r, m in mats.items() if isinstance(m, CausalityMatrix)}

            def emit(criterion: str, realization: int, net: AdjacencyNetwork | None, err: str = ""):
                base = ResultRow(
                    system=cfg.system,
                    K=cfg.K,
                    n=cfg.n,
                    param=cfg.param_label,
                    C=C,
                    measure=label,
                    criterion=criterion,
                    realization=realization,
                    error=err,
                )
                if net is None:
                    rows.append(base)
                    return
                rep = indices(confusion(truth, net))
                rows.append(
                    replace(
                        base,
                        TP=rep.counts.TP,
                        FP=rep.counts.FP,
                        FN=rep.counts.FN,
                        TN=rep.counts.TN,
                        sens=rep.sens,
                        spec=rep.spec,
                        prec=rep.prec,
                        MCC=rep.mcc,
                        FM=rep.fm,
                        HD=rep.hd,
                    )
                )

            criteria: list[tuple[str, object]] = []
            if mspec.name == "pmime":
                criteria.append(("positive", None))
            else:
                for alpha in cfg.alphas:
                    criteria.append((f"significance(alpha={alpha:g})", ("alpha", alpha)))
                for mult in cfg.density_multiples:
                    rho = max(1, min(int(round(mult * rho0)), cfg.K * (cfg.K - 1)))
                    criteria.append((f"density(rho={rho})", ("density", rho)))
                for mult in cfg.magnitude_multiples:
                    rho = max(1, min(int(round(mult * rho0)), cfg.K * (cfg.K - 1)))
                    if good:
                        th = threshold_from_density(list(good.values()), rho)
                        criteria.append((f"magnitude(th_{rho})", ("magnitude", th)))

            for realization in range(cfg.realizations):
                mat = mats.get(realization)
                if not isinstance(mat, CausalityMatrix):
                    for crit_label, _ in criteria:
                        emit(crit_label, realization, None, err=str(mat))
                    continue
                for crit_label, crit in criteria:
                    if crit is None:
                        emit(crit_label, realization, binarize_positive(mat))
                        continue
                    kind, value = crit
                    if kind == "alpha":
                        pm = slot["pvals"].get(label, {}).get(realization)
                        if pm is None:
                            emit(crit_label, realization, None, err="no p-values computed")
                        else:
                            emit(crit_label, realization, binarize_significance(pm, value))
                    elif kind == "density":
                        emit(crit_label, realization, binarize_density(mat, value))
                    else:
                        emit(crit_label, realization, binarize_magnitude(mat, value))

    rows.sort(key=lambda r: (r.C, r.measure, r.criterion, r.realization))
    return rows


def write_results(path, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_FIELDS)
        for row in rows:
            writer.writerow(row.as_fields())


def read_results(path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RESULT_FIELDS:
            raise ValueError(f"{path}: unexpected result header")
        for parts in reader:
            rec = dict(zip(RESULT_FIELDS, parts))
            rows.append(
                ResultRow(
                    system=rec["system"],
                    K=int(rec["K"]),
                    n=int(rec["n"]),
                    param=rec["param"],
                    C=float(rec["C"]),
                    measure=rec["measure"],
                    criterion=rec["criterion"],
                    realization=int(rec["realization"]),
                    TP=int(rec["TP"]),
                    FP=int(rec["FP"]),
                    FN=int(rec["FN"]),
                    TN=int(rec["TN"]),
                    sens=float(rec["sens"]),
                    spec=float(rec["spec"]),
                    prec=float(rec["prec"]),
                    MCC=float(rec["MCC"]),
                    FM=float(rec["FM"]),
                    HD=int(rec["HD"]),
                    error=rec["error"],
                )
            )
    return rows


# ---------------------------------------------------------------------------
# ranking reports

def _mean(vals):
    return float(np.mean(vals)) if len(vals) else float("nan")


def report_rankings(rows: list[ResultRow]) -> str:
    """Human-readable ranking report.

    Per scenario and criterion, measures are ordered by mean match
    correlation; per scenario, ranks across coupling strengths collapse to
    a normalized score; the overall table keeps each measure family's
    best-scoring parameterization.
    """
    if not rows:
        raise ValueError("empty result table")
    ok_rows = [r for r in rows if not r.error]
    criteria = sorted({r.criterion for r in ok_rows if r.criterion != "positive"})
    systems = sorted({(r.system, r.K, r.n, r.param) for r in ok_rows})
    measures = sorted({r.measure for r in ok_rows})
    out: list[str] = []

    def block_rows(criterion: str):
        return [r for r in ok_rows if r.criterion in (criterion, "positive")]

    if not criteria:  # only the positivity rule present
        criteria = ["positive"]

    overall_scores: dict[str, list[float]] = {m: [] for m in measures}
    for criterion in criteria:
        rows_c = block_rows(criterion)
        for system, K, n, param in systems:
            rows_s = [r for r in rows_c if (r.system, r.K, r.n, r.param) == (system, K, n, param)]
            if not rows_s:
                continue
            couplings = sorted({r.C for r in rows_s})
            scen_label = f"{system} K={K} n={n}" + (f" {param}" if param else "")
            present = sorted({r.measure for r in rows_s})
            rank_cols = np.zeros((len(present), len(couplings)), dtype=int)
            for ci, C in enumerate(couplings):
                mcc_means = []
                for m in present:
                    sel = [r.MCC for r in rows_s if r.C == C and r.measure == m]
                    mcc_means.append(_mean(sel))
                if len(present) >= 2:
                    seed = zlib.crc32(f"{criterion}|{scen_label}|{C:g}".encode())
                    rank_cols[:, ci] = rank_measures(np.array(mcc_means), seed=seed)
                else:
                    rank_cols[:, ci] = 1
                out.append(f"== {scen_label} C={C:g} [{criterion}] ==")
                order = np.argsort([-v for v in mcc_means], kind="stable")
                out.append(f"{'measure':24s} {'sens':>6s} {'spec':>6s} {'MCC':>6s} {'FM':>6s} {'HD':>7s}")
                for q in order:
                    m = present[q]
                    sel = [r for r in rows_s if r.C == C and r.measure == m]
                    out.append(
                        f"{m:24s} {_mean([r.sens for r in sel]):6.2f} {_mean([r.spec for r in sel]):6.2f} "
                        f"{_mean([r.MCC for r in sel]):6.2f} {_mean([r.FM for r in sel]):6.2f} "
                        f"{_mean([r.HD for r in sel]):7.1f}"
                    )
                out.append("")
            if len(present) >= 2:
                out.append(f"-- score index, {scen_label} [{criterion}] --")
                scores = [(score_from_ranks(rank_cols[q], len(present)), present[q]) for q in range(len(present))]
                for s, m in sorted(scores, reverse=True):
                    out.append(f"{m:24s} score {s:.2f}")
                    overall_scores[m].append(s)
                out.append("")

    usable = {m: v for m, v in overall_scores.items() if v}
    if usable:
        out.append("== overall score (average over scenario cells; best parameterization per family) ==")
        best_by_family: dict[str, tuple[float, str]] = {}
        for m, vals in usable.items():
            family = m.split("(")[0]
            s = _mean(vals)
            if family not in best_by_family or s > best_by_family[family][0]:
                best_by_family[family] = (s, m)
        for family, (s, m) in sorted(best_by_family.items(), key=lambda kv: -kv[1][0]):
            out.append(f"{m:24s} score {s:.2f}")
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# configuration file parsing

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(",", " ").split())


def split_measure_list(text: str) -> list[str]:
    """Split a comma-separated measure list, ignoring commas inside parens."""
    items, depth, buf = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    items.append("".join(buf))
    return [s.strip() for s in items if s.strip()]


def load_config(path) -> ExperimentConfig:
    """Read the INI-style experiment description."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ValueError(f"cannot read config file {path}")
    try:
        system = cp.get("system", "name")
        K = cp.getint("system", "K")
        n = cp.getint("system", "n")
        couplings = _floats(cp.get("system", "C", fallback="0"))
        measures = tuple(parse_measure(s) for s in split_measure_list(cp.get("measures", "specs")))
    except (configparser.Error, KeyError) as exc:
        raise ValueError(f"bad config: {exc}") from exc
    if not measures:
        raise ValueError("no measures configured")
    return ExperimentConfig(
        system=system,
        K=K,
        n=n,
        couplings=couplings,
        measures=measures,
        alphas=_floats(cp.get("criteria", "alpha", fallback="")),
        density_multiples=_floats(cp.get("criteria", "density", fallback="")),
        magnitude_multiples=_floats(cp.get("criteria", "magnitude", fallback="")),
        realizations=cp.getint("experiment", "realizations", fallback=10),
        surrogates=cp.getint("criteria", "surrogates", fallback=100),
        seed=cp.getint("experiment", "seed", fallback=12345),
        workers=cp.getint("experiment", "workers", fallback=1),
        delay=cp.getfloat("system", "delay", fallback=100.0),
        excitation=cp.getfloat("system", "A", fallback=3.45),
        var_order=cp.getint("system", "order", fallback=3),
        coeff_seed=cp.getint("system", "coeff_seed", fallback=0),
        outdir=cp.get("experiment", "outdir", fallback="results"),
    )
