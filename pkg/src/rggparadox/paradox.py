"""Friendship index per node and the friendship paradox index of a graph."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rgg import CircularRGG


@dataclass(frozen=True)
class ParadoxResult:
    delta: np.ndarray
    f_n: float
    n_isolated: int


def _delta(neighbor_sums: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    # integer numerator and denominator; the division is the only rounding
    out = np.zeros(degrees.shape, dtype=float)
    nz = degrees > 0
    out[nz] = neighbor_sums[nz] / degrees[nz] - degrees[nz]
    return out


def friendship_index(g: CircularRGG, i: int) -> float:
    """Mean neighbor degree minus own degree; 0 for an isolated node."""
    d = int(g.degrees[i])
    if d == 0:
        return 0.0
    return g.neighbor_degree_sum(i) / d - d


def paradox_from_degrees(neighbor_sums: np.ndarray, degrees: np.ndarray) -> ParadoxResult:
    """F_n from integer neighbor-degree sums and degrees (any graph)."""
    degrees = np.asarray(degrees, dtype=np.int64)
    delta = _delta(np.asarray(neighbor_sums, dtype=np.int64), degrees)
    n = degrees.size
    # fsum is correctly rounded, hence independent of accumulation order
    f_n = math.fsum(delta.tolist()) / n if n else 0.0
    return ParadoxResult(delta, f_n, int(np.count_nonzero(degrees == 0)))


def friendship_paradox(g: CircularRGG) -> ParadoxResult:
    """``F_n = (1/n) sum_i Delta_i`` in O(n) from the graph's prefix sums."""
    return paradox_from_degrees(g.neighbor_degree_sums(), g.degrees)


def paradox_from_edges(n: int, edges: np.ndarray) -> ParadoxResult:
    """Same statistic computed from an explicit edge list; used as an oracle."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    degrees = np.bincount(edges.ravel(), minlength=n).astype(np.int64)
    sums = np.zeros(n, dtype=np.int64)
    np.add.at(sums, edges[:, 0], degrees[edges[:, 1]])
    np.add.at(sums, edges[:, 1], degrees[edges[:, 0]])
    return paradox_from_degrees(sums, degrees)


def write_paradox_csv(g: CircularRGG, result: ParadoxResult, path: str | Path) -> None:
    """Per-node output ``node, position, degree, delta``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "position", "degree", "delta"])
        for i in range(g.n):
            w.writerow([i, repr(float(g.positions.x[i])), int(g.degrees[i]), repr(float(result.delta[i]))])


def summary_row(g: CircularRGG, result: ParadoxResult) -> dict:
    return {"n": g.n, "r": g.radius, "f_n": result.f_n, "n_isolated": result.n_isolated}
