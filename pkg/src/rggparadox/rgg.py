"""Circular random geometric graphs built by a sorted sweep.

On the circle of circumference 1 every metric ball is an arc, so the
neighbors of a node are contiguous in sorted order.  The graph is stored
implicitly: per sorted rank, a half-open window ``[lo, hi)`` into the
doubled sorted array ``(x_sorted, x_sorted + 1)``, plus degree prefix sums
over the same doubled array.  Windows include the node itself.

Connection rule is inclusive: ``circ_dist(x, y) <= r``.  Because positions
are floats, a distance that exceeds r by at most ``TIE_EPS`` is treated as a
tie (so that e.g. ``n`` nodes at ``i/n`` with ``r = 1/n`` form a cycle).
The sweep and the brute-force oracle share this predicate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import RadiusOutOfRange, TooLargeForOracle

TIE_EPS = 1e-12
ORACLE_MAX_N = 20000
_SEARCH_MARGIN = 1e-9


def circ_dist(x, y):
    """Arc distance ``min(|x - y|, 1 - |x - y|)`` on the unit circle."""
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    out = np.minimum(d, 1.0 - d)
    return float(out) if out.ndim == 0 else out


def within_radius(d, r: float):
    return d <= r + TIE_EPS


class NodePositions:
    """Node coordinates in [0, 1) together with their sorting permutation."""

    __slots__ = ("x", "sorted_order", "x_sorted")

    def __init__(self, x) -> None:
        arr = np.array(x, dtype=float, ndmin=1)
        if arr.ndim != 1:
            raise ValueError("positions must be a 1-d array")
        if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1):
            raise ValueError("positions must lie in [0, 1]")
        arr[arr == 1.0] = 0.0
        arr.setflags(write=False)
        self.x = arr
        self.sorted_order = np.argsort(arr, kind="stable")
        self.sorted_order.setflags(write=False)
        self.x_sorted = arr[self.sorted_order]
        self.x_sorted.setflags(write=False)

    def __len__(self) -> int:
        return self.x.size

    def shifted(self, delta: float) -> "NodePositions":
        y = np.mod(self.x + delta, 1.0)
        y[y >= 1.0] = 0.0
        return NodePositions(y)

    def __repr__(self) -> str:
        return f"NodePositions(n={len(self)})"


@dataclass(frozen=True, eq=False)
class CircularRGG:
    """Immutable circular RGG with contiguous-window neighborhoods.

    ``degrees`` is indexed by node id; ``window_lo``/``window_hi`` and
    ``degree_prefix`` by sorted rank in the doubled array.
    """

    positions: NodePositions
    radius: float
    degrees: np.ndarray
    window_lo: np.ndarray
    window_hi: np.ndarray
    degree_prefix: np.ndarray

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def rank(self) -> np.ndarray:
        """Sorted rank of each node id."""
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.positions.sorted_order] = np.arange(self.n)
        return inv

    def neighbor_degree_sums(self) -> np.ndarray:
        """``sum_{j in N(i)} d_j`` for every node, indexed by node id (int64)."""
        order = self.positions.sorted_order
        own = self.degrees[order]
        per_rank = self.degree_prefix[self.window_hi] - self.degree_prefix[self.window_lo] - own
        out = np.empty(self.n, dtype=np.int64)
        out[order] = per_rank
        return out

    def neighbor_degree_sum(self, i: int) -> int:
        k = int(self.rank[i])
        lo, hi = self.window_lo[k], self.window_hi[k]
        return int(self.degree_prefix[hi] - self.degree_prefix[lo] - self.degrees[i])

    def neighbors(self, i: int) -> np.ndarray:
        """Node ids adjacent to ``i``, in circular sorted order."""
        k = int(self.rank[i])
        ranks = np.arange(self.window_lo[k], self.window_hi[k]) % self.n
        ranks = ranks[ranks != k]
        return self.positions.sorted_order[ranks]

    def edges(self) -> np.ndarray:
        """Expand the windows into a sorted ``(m, 2)`` edge list of node ids, u < v."""
        if self.n > ORACLE_MAX_N:
            raise TooLargeForOracle(f"refusing to materialize edges for n={self.n}")
        n = self.n
        order = self.positions.sorted_order
        lengths = self.window_hi - self.window_lo
        src_rank = np.repeat(np.arange(n), lengths)
        starts = np.repeat(self.window_lo, lengths)
        offsets = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        dst_rank = (starts + offsets) % n
        keep = dst_rank != src_rank
        u = order[src_rank[keep]]
        v = order[dst_rank[keep]]
        keys = np.unique(np.minimum(u, v) * n + np.maximum(u, v))
        return np.stack([keys // n, keys % n], axis=1)


def build_graph(p: NodePositions, r: float) -> CircularRGG:
    """Build the circular RGG with connection radius ``r`` in O(n log n)."""
    if not (0.0 <= r <= 0.5):
        raise RadiusOutOfRange(f"radius must lie in [0, 0.5], got {r!r}")
    n = len(p)
    xs = np.asarray(p.x_sorted)
    ext = np.concatenate([xs, xs + 1.0])
    ranks = np.arange(n)
    # centre each node in whichever copy leaves room on both sides
    centre = np.where(xs < 0.5, ranks + n, ranks)
    v = ext[centre]
    lo = np.searchsorted(ext, v - r - _SEARCH_MARGIN, side="left")
    hi = np.searchsorted(ext, v + r + _SEARCH_MARGIN, side="right")

    # trim candidates admitted only by the search margin
    while True:
        bad = (lo < centre) & ~within_radius(circ_dist(xs, xs[lo % n]), r)
        if not bad.any():
            break
        lo[bad] += 1
    while True:
        last = hi - 1
        bad = (last > centre) & ~within_radius(circ_dist(xs, xs[last % n]), r)
        if not bad.any():
            break
        hi[bad] -= 1

    # a window can span the circle once at most (antipodal ties at r = 0.5)
    hi = np.minimum(hi, lo + n)
    deg_sorted = (hi - lo - 1).astype(np.int64)
    degrees = np.empty(n, dtype=np.int64)
    degrees[p.sorted_order] = deg_sorted
    prefix = np.zeros(2 * n + 1, dtype=np.int64)
    np.cumsum(np.concatenate([deg_sorted, deg_sorted]), out=prefix[1:])
    for arr in (degrees, lo, hi, prefix):
        arr.setflags(write=False)
    return CircularRGG(p, float(r), degrees, lo, hi, prefix)


def naive_adjacency(p: NodePositions, r: float, block: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force degrees and lexicographically sorted edge list (u < v).

    O(n^2) time; guarded to ``n <= 20000``.
    """
    n = len(p)
    if n > ORACLE_MAX_N:
        raise TooLargeForOracle(f"naive oracle limited to n <= {ORACLE_MAX_N}, got {n}")
    if not (0.0 <= r <= 0.5):
        raise RadiusOutOfRange(f"radius must lie in [0, 0.5], got {r!r}")
    x = np.asarray(p.x)
    degrees = np.zeros(n, dtype=np.int64)
    us, vs = [], []
    cols = np.arange(n)
    for a in range(0, n, block):
        b = min(a + block, n)
        d = circ_dist(x[a:b, None], x[None, :])
        adj = within_radius(d, r)
        adj[np.arange(b - a), np.arange(a, b)] = False
        degrees[a:b] = adj.sum(axis=1)
        upper = adj & (cols[None, :] > np.arange(a, b)[:, None])
        iu, iv = np.nonzero(upper)
        us.append(iu + a)
        vs.append(iv)
    edges = np.stack([np.concatenate(us), np.concatenate(vs)], axis=1).astype(np.int64)
    return degrees, edges  # np.nonzero is row-major, so already lexicographic


def write_nodes_csv(g: CircularRGG, path: str | Path) -> None:
    """Graph dump: ``node, position, degree``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "position", "degree"])
        for i in range(g.n):
            w.writerow([i, repr(float(g.positions.x[i])), int(g.degrees[i])])


def write_edges_csv(g: CircularRGG, path: str | Path) -> None:
    """Edge list ``u, v`` in sorted-rank labels with ``u < v``; only for n <= 20000."""
    rank = g.rank
    e = g.edges()
    ru, rv = rank[e[:, 0]], rank[e[:, 1]]
    pairs = np.stack([np.minimum(ru, rv), np.maximum(ru, rv)], axis=1)
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v"])
        w.writerows(pairs.tolist())
