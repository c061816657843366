"""Monte Carlo estimates of conditional motif probabilities at a fixed anchor.

Node 1 sits at the anchor x; the remaining motif nodes are drawn i.i.d.
from the density.  Replicates are processed in fixed-size chunks, each with
its own generator seeded from ``(seed, chunk index)``, and reduced as
integer hit counts, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .density import PeriodicDensity
from .errors import RadiusOutOfRange, SampleBudgetTooSmall
from .rgg import within_radius, circ_dist
from .theory import MotifKind

MIN_SAMPLES = 10**4
CHUNK = 2**16

# Members of each family, as products of A_ij over nodes 1..4 (node 1 = anchor).
# The first member is the representative used for the family's MotifKind.
FAMILY_MEMBERS: dict[MotifKind, tuple[str, ...]] = {
    MotifKind.EDGE: ("A12",),
    MotifKind.CHERRY: ("A12A13",),
    MotifKind.PATH: ("A12A23",),
    MotifKind.TRIANGLE: ("A12A13A23",),
    MotifKind.THREE_EDGE_PATH: ("A12A23A24", "A12A13A34", "A12A13A14"),
    MotifKind.TRIANGLE_PLUS_EDGE: ("A12A13A23A34", "A12A13A23A14"),
}


def parse_member(member: str) -> list[tuple[int, int]]:
    """``"A12A23"`` -> ``[(1, 2), (2, 3)]``."""
    pairs = re.findall(r"A(\d)(\d)", member)
    if not pairs or "".join(f"A{a}{b}" for a, b in pairs) != member:
        raise ValueError(f"malformed motif member {member!r}")
    edges = [(int(a), int(b)) for a, b in pairs]
    if any(a == b for a, b in edges) or 1 not in {v for e in edges for v in e}:
        raise ValueError(f"motif member {member!r} must link the anchor node 1 and have no loops")
    return edges


@dataclass(frozen=True)
class MomentEstimate:
    motif: MotifKind
    anchor_x: float
    r: float
    mean: float
    stderr: float
    samples: int
    seed: int
    hits: int
    member: str


def _chunk_hits(d: PeriodicDensity, x: float, r: float, edges, aux: list[int], seed: int, index: int, size: int) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
    pts = d.sample_array(rng, (size, len(aux)))
    cols = {v: pts[:, j] for j, v in enumerate(aux)}
    cols[1] = np.full(size, x)
    hit = np.ones(size, dtype=bool)
    for a, b in edges:
        hit &= within_radius(circ_dist(cols[a], cols[b]), r)
    return int(np.count_nonzero(hit))


def estimate_motif(
    d: PeriodicDensity,
    x: float,
    r: float,
    motif: MotifKind | str,
    samples: int,
    seed: int,
    workers: int = 1,
    member: str | None = None,
) -> MomentEstimate:
    """Estimate ``E[motif indicator | X_1 = x]`` from `samples` replicates.

    ``member`` selects a specific family member such as ``"A12A13A14"``;
    by default the family's representative is used.
    """
    motif = MotifKind(motif)
    if samples < MIN_SAMPLES:
        raise SampleBudgetTooSmall(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if not (0.0 < r <= 0.5):
        raise RadiusOutOfRange(f"radius must lie in (0, 0.5], got {r!r}")
    member = member or FAMILY_MEMBERS[motif][0]
    if member not in FAMILY_MEMBERS[motif]:
        raise ValueError(f"{member!r} is not a member of the {motif.value} family")
    edges = parse_member(member)
    aux = sorted({v for e in edges for v in e} - {1})
    x = float(x) % 1.0

    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    jobs = list(enumerate(sizes))

    def run(job):
        index, size = job
        return _chunk_hits(d, x, r, edges, aux, seed, index, size)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, jobs))
    else:
        hits = sum(map(run, jobs))

    mean = hits / samples
    # sample variance of a 0/1 indicator, ddof = 1
    var = (hits - hits * hits / samples) / (samples - 1)
    stderr = math.sqrt(max(var, 0.0) / samples)
    return MomentEstimate(motif, x, float(r), mean, stderr, samples, seed, hits, member)


def boundary_sweep(
    d: PeriodicDensity,
    r: float,
    motif: MotifKind | str,
    anchors,
    samples: int = 10**6,
    seed: int = 0,
    workers: int = 1,
) -> list[MomentEstimate]:
    """One estimate per anchor, all with the same seed (common random numbers).

    Anchors are meant to cover both sides of the seam, i.e. points in
    ``[0, r)``, ``[r, 1 - r]`` and ``(1 - r, 1)``.
    """
    return [estimate_motif(d, a, r, motif, samples, seed, workers) for a in anchors]
