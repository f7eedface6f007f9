"""Command-line interface.

Subcommands: generate (simulate a system), measure (data -> causality
matrix, optionally with surrogate p-values), test (matrix -> binary
network), evaluate (two networks -> indices), bench (full sweep from a
config file), report (result table -> rankings). Matrix files are plain
text, row-major, space-delimited.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import CausalityMatrix, standardize
from .errors import CausnetError
from .evaluation import confusion, indices
from .experiment import (
    generate_system,
    load_config,
    read_results,
    report_rankings,
    run_experiment,
    write_results,
)
from .measures import compute_matrix, make_pair_evaluator, parse_measure
from .significance import (
    AdjacencyNetwork,
    binarize_density,
    binarize_magnitude,
    binarize_positive,
    binarize_significance,
    surrogate_test,
)


def _cmd_generate(args) -> int:
    ts, graph = generate_system(
        args.system,
        args.K,
        args.n,
        args.C,
        args.seed,
        delay=args.delay,
        excitation=args.A,
        var_order=args.order,
        coeff_seed=args.coeff_seed,
    )
    out = Path(args.out)
    io.save_timeseries(out, ts, header=not args.no_header)
    adj_path = out.with_suffix(out.suffix + ".adj") if args.adjacency is None else Path(args.adjacency)
    io.save_adjacency(adj_path, graph.adjacency)
    print(f"wrote {out} ({ts.n}x{ts.K}) and {adj_path} ({graph.density} edges)")
    return 0


def _cmd_measure(args) -> int:
    ts = standardize(io.load_timeseries(args.input))
    mspec = parse_measure(args.measure)
    cm = compute_matrix(ts, mspec)
    io.save_causality_matrix(args.out, cm)
    print(f"wrote {args.out} [{mspec.label}]")
    if args.pvalues:
        evaluate = make_pair_evaluator(mspec, ts)
        pm = np.ones((ts.K, ts.K))
        for i in range(ts.K):
            for j in range(ts.K):
                if i != j:
                    pm[i, j] = surrogate_test(
                        evaluate, ts, i, j, M=args.surrogates, seed=args.seed
                    ).p_value
        io.save_matrix(args.pvalues, pm, comment=f"p-values {mspec.label} M={args.surrogates}")
        print(f"wrote {args.pvalues} (M={args.surrogates})")
    return 0


def _parse_criterion(text: str):
    if ":" in text:
        kind, _, params = text.partition(":")
    else:
        kind, params = text, ""
    kind = kind.strip().lower()
    kv = {}
    for item in filter(None, (s.strip() for s in params.split(","))):
        key, _, val = item.partition("=")
        kv[key.strip().lower()] = float(val)
    return kind, kv


def _cmd_test(args) -> int:
    values = io.load_matrix(args.input)
    kind, kv = _parse_criterion(args.criterion)
    if kind == "significance":
        net = binarize_significance(values, kv.get("alpha", 0.05))
    else:
        cm = CausalityMatrix(values, "file")
        if kind == "density":
            net = binarize_density(cm, int(kv["rho"]))
        elif kind == "magnitude":
            net = binarize_magnitude(cm, kv["th"])
        elif kind == "positive":
            net = binarize_positive(cm)
        else:
            raise ValueError(f"unknown criterion {args.criterion!r}")
    io.save_adjacency(args.out, net.matrix)
    print(f"wrote {args.out} [{net.criterion}] edges={net.edges}")
    return 0


def _cmd_evaluate(args) -> int:
    truth = AdjacencyNetwork(io.load_adjacency(args.truth), "truth")
    est = AdjacencyNetwork(io.load_adjacency(args.estimate), "estimate")
    rep = indices(confusion(truth, est))
    c = rep.counts
    print(f"TP={c.TP} FP={c.FP} FN={c.FN} TN={c.TN}")
    print(
        f"sens={rep.sens:.4f} spec={rep.spec:.4f} prec={rep.prec:.4f} "
        f"MCC={rep.mcc:.4f} FM={rep.fm:.4f} HD={rep.hd}"
    )
    return 0


def _cmd_bench(args) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.outdir or cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    total = len(cfg.couplings) * cfg.realizations

    def progress(cell):
        _, scen, C, r = cell
        done = scen * cfg.realizations + r + 1
        print(f"  cell {done}/{total} (C={C:g}, realization {r})", flush=True)

    rows = run_experiment(cfg, progress=progress if args.verbose else None)
    results_path = outdir / "results.csv"
    write_results(results_path, rows)
    report = report_rankings(rows)
    report_path = outdir / "report.txt"
    report_path.write_text(report)
    failures = sum(1 for r in rows if r.error)
    print(f"wrote {results_path} ({len(rows)} rows, {failures} failed cells) and {report_path}")
    return 0


def _cmd_report(args) -> int:
    rows = read_results(args.results)
    text = report_rankings(rows)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="causnet",
        description="Reconstruct directed causality networks from multivariate "
        "time series and benchmark measures on simulated systems.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a coupled system")
    g.add_argument("--system", required=True, choices=("henon", "mackey_glass", "neural_mass", "sparse_var"))
    g.add_argument("--K", type=int, default=5, help="number of channels (default 5)")
    g.add_argument("--n", type=int, default=512, help="samples per channel (default 512)")
    g.add_argument("--C", type=float, default=0.2, help="coupling strength (default 0.2)")
    g.add_argument("--delay", type=float, default=100.0, help="feedback delay, mackey_glass only (default 100)")
    g.add_argument("--A", type=float, default=3.45, help="excitation, neural_mass only (default 3.45)")
    g.add_argument("--order", type=int, default=3, help="VAR order, sparse_var only (default 3)")
    g.add_argument("--coeff-seed", type=int, default=0, help="coefficient draw seed, sparse_var only")
    g.add_argument("--seed", type=int, default=0, help="realization seed (default 0)")
    g.add_argument("--out", required=True, help="output data file")
    g.add_argument("--adjacency", default=None, help="ground-truth file (default: OUT.adj)")
    g.add_argument("--no-header", action="store_true", help="omit the label header line")
    g.set_defaults(fn=_cmd_generate)

    m = sub.add_parser("measure", help="compute a causality matrix from data")
    m.add_argument("--input", required=True, help="data file (rows: time, cols: channels)")
    m.add_argument("--measure", required=True, help='e.g. "te(m=2,tau=1)" or "rgpdc(p=3,band=alpha)"')
    m.add_argument("--out", required=True, help="output matrix file")
    m.add_argument("--pvalues", default=None, help="also write surrogate-test p-values here")
    m.add_argument("--surrogates", type=int, default=100, help="surrogate count M (default 100)")
    m.add_argument("--seed", type=int, default=0, help="surrogate seed (default 0)")
    m.set_defaults(fn=_cmd_measure)

    t = sub.add_parser("test", help="binarize a matrix into a network")
    t.add_argument("--input", required=True, help="matrix file (p-values for the significance criterion)")
    t.add_argument(
        "--criterion",
        required=True,
        help='"significance:alpha=0.05" | "density:rho=6" | "magnitude:th=0.2" | "positive"',
    )
    t.add_argument("--out", required=True, help="output adjacency file")
    t.set_defaults(fn=_cmd_test)

    e = sub.add_parser("evaluate", help="score an estimated network against the truth")
    e.add_argument("--truth", required=True, help="ground-truth adjacency file")
    e.add_argument("--estimate", required=True, help="estimated adjacency file")
    e.set_defaults(fn=_cmd_evaluate)

    b = sub.add_parser("bench", help="run a full benchmark sweep from a config file")
    b.add_argument("--config", required=True, help="INI experiment description")
    b.add_argument("--outdir", default=None, help="override the config's output directory")
    b.add_argument("--verbose", action="store_true", help="print per-cell progress")
    b.set_defaults(fn=_cmd_bench)

    r = sub.add_parser("report", help="rankings and scores from a result table")
    r.add_argument("--results", required=True, help="results.csv from bench")
    r.add_argument("--out", default=None, help="write the report here instead of stdout")
    r.set_defaults(fn=_cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CausnetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
