"""Experiment drivers: seeded replication, convergence studies, moment
verification and sweep-vs-oracle checks.

Every replicate owns a generator seeded from ``SeedSequence([master_seed,
n, replicate])``.  Aggregation happens after all replicates finish, in
replicate order, so output does not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .density import PeriodicDensity, make_density
from .errors import InfeasibleRadius, TooLargeForOracle
from .moments import estimate_motif
from .paradox import friendship_paradox, paradox_from_edges
from .rgg import ORACLE_MAX_N, build_graph, naive_adjacency
from .theory import EXACT_MOTIFS, MotifKind, expected_fn, motif_prob_asymptotic, motif_prob_exact, observed_order

log = logging.getLogger(__name__)

DEFAULT_N_VALUES = (2000, 8000, 32000)
DEFAULT_REPLICATIONS = 20
TREND_SLACK = 1.15


# -- radius rules ----------------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    r: float

    def radius(self, n: int) -> float:
        return self.r


@dataclass(frozen=True)
class PowerLaw:
    """``r = c * n**(-alpha)``."""

    c: float
    alpha: float

    def radius(self, n: int) -> float:
        return self.c * n ** (-self.alpha)


@dataclass(frozen=True)
class LambdaRule:
    """``r = (lam / n)**(1/3)``, so that ``n r^3 = lam``."""

    lam: float

    def radius(self, n: int) -> float:
        return (self.lam / n) ** (1.0 / 3.0)


RadiusRule = Fixed | PowerLaw | LambdaRule


def make_rule(spec: dict[str, Any]) -> RadiusRule:
    kind = str(spec.get("kind", "fixed")).lower()
    if kind == "fixed":
        return Fixed(float(spec["r"]))
    if kind in ("powerlaw", "power"):
        return PowerLaw(float(spec.get("c", 1.0)), float(spec["alpha"]))
    if kind in ("lambda", "lambdarule"):
        return LambdaRule(float(spec.get("lambda", spec.get("lam"))))
    raise ValueError(f"unknown radius rule {kind!r}")


# -- seeding ---------------------------------------------------------------


def replicate_seed(master_seed: int, n: int, replicate: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, n, replicate])


def derive_seed(*keys: int) -> int:
    """A 63-bit integer seed hashed from integer keys."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1, np.uint64)[0] >> np.uint64(1))


def rng_for(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_seq))


# -- grid ------------------------------------------------------------------


@dataclass
class ExperimentGrid:
    density: PeriodicDensity
    n_values: Sequence[int] = DEFAULT_N_VALUES
    radius_rule: RadiusRule = field(default_factory=lambda: PowerLaw(1.0, 0.7))
    replications: int = DEFAULT_REPLICATIONS
    master_seed: int = 0
    workers: int = 1

    def radii(self) -> list[tuple[int, float]]:
        """``(n, r)`` per grid point; raises before any sampling if r leaves (0, 0.5]."""
        out = []
        for n in self.n_values:
            if n < 1:
                raise ValueError(f"n must be positive, got {n}")
            r = self.radius_rule.radius(n)
            if not (0.0 < r <= 0.5):
                raise InfeasibleRadius(f"radius rule gives r={r!r} for n={n}, outside (0, 0.5]")
            if n * r < 1.0:
                log.warning("n*r = %.3g < 1 at n=%d: graph is sparser than the model assumes", n * r, n)
            out.append((int(n), float(r)))
        return out

    @classmethod
    def from_config(cls, cfg: dict[str, Any]) -> "ExperimentGrid":
        return cls(
            density=make_density(cfg.get("density", {"kind": "uniform"})),
            n_values=tuple(int(n) for n in cfg.get("n_values", DEFAULT_N_VALUES)),
            radius_rule=make_rule(cfg.get("radius_rule", {"kind": "powerlaw", "c": 1.0, "alpha": 0.7})),
            replications=int(cfg.get("replications", DEFAULT_REPLICATIONS)),
            master_seed=int(cfg.get("master_seed", 0)),
            workers=int(cfg.get("workers", 1)),
        )


# -- single runs and replication ------------------------------------------


def simulate_once(d: PeriodicDensity, n: int, r: float, seed_seq: np.random.SeedSequence):
    positions = d.sample(n, rng_for(seed_seq))
    g = build_graph(positions, r)
    return g, friendship_paradox(g)


def replicate_fn(d: PeriodicDensity, n: int, r: float, master_seed: int, replications: int, workers: int = 1) -> list[float]:
    """F_n for each replicate, in replicate order."""

    def one(k: int) -> float:
        return simulate_once(d, n, r, replicate_seed(master_seed, n, k))[1].f_n

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(replications)))
    return [one(k) for k in range(replications)]


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    r: float
    nr3: float
    regime: str
    fn_mean: float
    fn_std: float
    prediction: float
    abs_err: float
    rel_err: float
    replications: int
    wall_time_ms: float

    FIELDS = ("n", "r", "nr3", "regime", "fn_mean", "fn_std", "prediction", "abs_err", "rel_err", "replications")

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        out = {k: getattr(self, k) for k in self.FIELDS}
        if timing:
            out["wall_time_ms"] = self.wall_time_ms
        return out


def summarize(values: Sequence[float]) -> tuple[float, float]:
    k = len(values)
    mean = math.fsum(values) / k
    if k < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var)


def run_convergence(grid: ExperimentGrid) -> list[ConvergenceRow]:
    rows = []
    for n, r in grid.radii():
        t0 = time.perf_counter()
        values = replicate_fn(grid.density, n, r, grid.master_seed, grid.replications, grid.workers)
        wall = (time.perf_counter() - t0) * 1e3
        mean, std = summarize(values)
        pred = expected_fn(grid.density, n, r)
        abs_err = abs(mean - pred.mean_fn)
        rows.append(
            ConvergenceRow(
                n, r, pred.nr3, str(pred.regime), mean, std, pred.mean_fn, abs_err,
                abs_err / pred.mean_fn, grid.replications, wall,
            )
        )
    return rows


def nonincreasing(values: Sequence[float], slack: float = TREND_SLACK) -> bool:
    return all(b <= slack * a for a, b in zip(values, values[1:]))


def trend_verdict(rows: Sequence[ConvergenceRow], slack: float = TREND_SLACK) -> bool:
    """PASS when rel_err and the coefficient of variation are both nonincreasing in n."""
    if len(rows) < 2:
        raise ValueError("trend analysis needs at least two n values")
    rows = sorted(rows, key=lambda row: row.n)
    cv = [row.fn_std / row.fn_mean if row.fn_mean > 0 else 0.0 for row in rows]
    return nonincreasing([row.rel_err for row in rows], slack) and nonincreasing(cv, slack)


# -- moment verification ---------------------------------------------------


MOMENT_FIELDS = (
    "motif", "anchor_x", "r", "samples", "mean", "stderr",
    "exact", "asymptotic", "abs_err_exact", "abs_err_asymptotic",
)
ORDER_FIELDS = ("motif", "anchor_x", "r_large", "r_small", "err_large", "err_small", "order")


def verify_moments(
    d: PeriodicDensity,
    radii: Sequence[float],
    anchors: Sequence[float],
    motifs: Iterable[MotifKind | str],
    samples: int,
    seed: int,
    workers: int = 1,
) -> tuple[list[dict], list[dict]]:
    """MC estimate, exact quadrature and leading-order value per (motif, anchor, r).

    All radii at a given (motif, anchor) share one seed, so estimates are
    monotone in r.  Returns the moment rows and the convergence-order rows
    for ``|exact - asymptotic|`` between consecutive radii.
    """
    if len(radii) < 2:
        raise ValueError("order estimation needs at least two radii")
    radii = sorted(radii, reverse=True)
    moment_rows, order_rows = [], []
    for mi, motif in enumerate(MotifKind(m) for m in motifs):
        for ai, x in enumerate(anchors):
            s = derive_seed(seed, mi, ai)
            errs = []
            for r in radii:
                est = estimate_motif(d, x, r, motif, samples, s, workers)
                asym = float(motif_prob_asymptotic(d, x, r, motif))
                exact = motif_prob_exact(d, x, r, motif) if motif in EXACT_MOTIFS and r <= 0.1 else math.nan
                errs.append(abs(exact - asym))
                moment_rows.append(
                    dict(zip(MOMENT_FIELDS, (
                        motif.value, float(x), r, samples, est.mean, est.stderr,
                        exact, asym, abs(est.mean - exact), abs(est.mean - asym),
                    )))
                )
            for (r1, e1), (r2, e2) in zip(zip(radii, errs), zip(radii[1:], errs[1:])):
                order_rows.append(
                    dict(zip(ORDER_FIELDS, (motif.value, float(x), r1, r2, e1, e2, observed_order(e1, e2, r1, r2))))
                )
    return moment_rows, order_rows


# -- sweep versus brute force ---------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    n: int
    density: str
    r: float
    instance: int
    degrees_equal: bool
    edges_equal: bool
    fn_equal: bool
    f_n: float

    @property
    def passed(self) -> bool:
        return self.degrees_equal and self.edges_equal and self.fn_equal


def check_positions(positions, r: float) -> tuple[bool, bool, bool, float]:
    """Compare sweep and brute-force paths on one set of positions."""
    g = build_graph(positions, r)
    deg, edges = naive_adjacency(positions, r)
    sweep = friendship_paradox(g).f_n
    naive = paradox_from_edges(len(positions), edges).f_n
    sweep_edges = g.edges()
    return (
        bool(np.array_equal(g.degrees, deg)),
        bool(sweep_edges.shape == edges.shape and np.array_equal(sweep_edges, edges)),
        sweep == naive,
        sweep,
    )


def oracle_check(
    n_values: Sequence[int],
    densities: Sequence[str],
    radii: Sequence[float],
    instances: int,
    seed: int,
    workers: int = 1,
) -> list[OracleResult]:
    for n in n_values:
        if n > ORACLE_MAX_N:
            raise TooLargeForOracle(f"oracle check limited to n <= {ORACLE_MAX_N}, got {n}")
    built = [(name, make_density(name)) for name in densities]
    jobs = [
        (n, di, name, d, r, k)
        for n in n_values
        for di, (name, d) in enumerate(built)
        for r in radii
        for k in range(instances)
    ]

    def run(job):
        n, di, name, d, r, k = job
        rng = rng_for(np.random.SeedSequence([seed, n, di, k]))
        result = check_positions(d.sample(n, rng), r)
        return OracleResult(n, name, r, k, *result)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]
