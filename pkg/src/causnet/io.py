"""Plain-text file formats.

Data files hold one row per time point with whitespace- or comma-delimited
columns and an optional header line of channel labels. Adjacency files hold
K lines of K space-separated 0/1 entries. Causality-matrix files are
row-major space-delimited K x K blocks (diagonal written as nan).
"""
from __future__ import annotations

import numpy as np

from .core import CausalityMatrix, TimeSeriesSet


def _tokenize(line: str) -> list[str]:
    return line.replace(",", " ").split()


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def load_timeseries(path) -> TimeSeriesSet:
    """Read a delimited text matrix, treating a non-numeric first line as labels."""
    with open(path) as fh:
        lines = [ln for ln in (l.strip() for l in fh) if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty data file")
    labels: tuple[str, ...] = ()
    first = _tokenize(lines[0])
    if not all(_is_number(t) for t in first):
        labels = tuple(first)
        lines = lines[1:]
    data = np.array([[float(t) for t in _tokenize(ln)] for ln in lines])
    return TimeSeriesSet(data, labels)


def save_timeseries(path, ts: TimeSeriesSet, header: bool = True) -> None:
    with open(path, "w") as fh:
        if header:
            fh.write(" ".join(ts.labels) + "\n")
        for row in ts.data:
            fh.write(" ".join(format(v, ".10g") for v in row) + "\n")


def load_adjacency(path) -> np.ndarray:
    with open(path) as fh:
        rows = [[int(t) for t in _tokenize(ln)] for ln in fh if ln.strip()]
    a = np.array(rows, dtype=np.int8)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{path}: adjacency matrix must be square")
    if not np.isin(a, (0, 1)).all():
        raise ValueError(f"{path}: adjacency entries must be 0 or 1")
    return a


def save_adjacency(path, a: np.ndarray) -> None:
    a = np.asarray(a)
    with open(path, "w") as fh:
        for row in a:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    """Read a square real matrix (nan allowed on the diagonal)."""
    with open(path) as fh:
        rows = [[float(t) for t in _tokenize(ln)] for ln in fh if ln.strip() and not ln.startswith("#")]
    m = np.array(rows, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{path}: matrix must be square")
    return m


def save_matrix(path, values: np.ndarray, comment: str = "") -> None:
    values = np.asarray(values, dtype=float)
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for row in values:
            fh.write(" ".join(format(v, ".10g") for v in row) + "\n")


def save_causality_matrix(path, cm: CausalityMatrix) -> None:
    params = " ".join(f"{k}={v}" for k, v in sorted(cm.params.items()))
    save_matrix(path, cm.values, comment=f"{cm.measure} {params}".strip())
