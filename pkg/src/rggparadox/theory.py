"""Deterministic predictions: the asymptotic mean of F_n, tau_f for von Mises
densities, and conditional motif probabilities given the anchor position.

All integrals are composite Simpson with panel doubling; nothing here is
random.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .density import PeriodicDensity, bessel_i0
from .errors import RadiusOutOfRange
from .quadrature import integrate_converged, integrate_periodic, simpson_weights

__all__ = [
    "MotifKind",
    "Prediction",
    "Regime",
    "classify_regime",
    "expected_fn",
    "integrate_periodic",
    "motif_prob_asymptotic",
    "motif_prob_exact",
    "observed_order",
    "table1",
    "tau_f",
]

SPARSE_BELOW = 0.01
DENSE_ABOVE = 100.0
TAU_GRID_KAPPAS = (0.1, 0.5, 1.0, 5.0, 10.0)
TAU_GRID_MUS = (0.1, 0.3, 0.5)
EXACT_MAX_RADIUS = 0.1


class RegimeKind(str, enum.Enum):
    RELATIVELY_SPARSE = "relatively_sparse"
    INTERMEDIATE = "intermediate"
    RELATIVELY_DENSE = "relatively_dense"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    lam: float | None = None

    def __str__(self) -> str:
        if self.kind is RegimeKind.INTERMEDIATE:
            return f"intermediate(lambda={self.lam!r})"
        return self.kind.value


def classify_regime(nr3: float, sparse_below: float = SPARSE_BELOW, dense_above: float = DENSE_ABOVE) -> Regime:
    """Bucket ``n * r**3`` into the three sparsity regimes."""
    if nr3 < sparse_below:
        return Regime(RegimeKind.RELATIVELY_SPARSE)
    if nr3 > dense_above:
        return Regime(RegimeKind.RELATIVELY_DENSE)
    return Regime(RegimeKind.INTERMEDIATE, nr3)


@dataclass(frozen=True)
class Prediction:
    n: int
    r: float
    mean_fn: float
    fprime_sq_integral: float
    regime: Regime
    density: PeriodicDensity = field(repr=False)

    @property
    def nr3(self) -> float:
        return self.n * self.r**3

    def mean_degree_at(self, x):
        """Leading term ``2 (n - 1) r f(x)`` of the expected degree at position x."""
        return 2.0 * (self.n - 1) * self.r * self.density.eval(x)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "nr3": self.nr3,
            "regime": str(self.regime),
            "integral_fprime_sq": self.fprime_sq_integral,
            "mean_fn": self.mean_fn,
        }


def expected_fn(
    d: PeriodicDensity,
    n: int,
    r: float,
    sparse_below: float = SPARSE_BELOW,
    dense_above: float = DENSE_ABOVE,
) -> Prediction:
    """Asymptotic mean ``(n r^3 / 3) * int f'^2 + 1/4`` (o(1) term dropped)."""
    if not (0.0 < r <= 0.5):
        raise RadiusOutOfRange(f"radius must lie in (0, 0.5], got {r!r}")
    integral = d.fprime_sq_integral()
    nr3 = n * r**3
    mean = nr3 / 3.0 * integral + 0.25
    return Prediction(n, float(r), mean, integral, classify_regime(nr3, sparse_below, dense_above), d)


def tau_f(kappa: float, mu: float = 0.0) -> float:
    """Coefficient of ``n r^3`` in the limit of F_n for a von Mises density."""
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0:
        return 0.0
    two_pi = 2.0 * math.pi

    def integrand(x):
        phase = two_pi * x - mu
        s = np.sin(phase)
        return np.exp(2.0 * kappa * np.cos(phase)) * s * s

    integral = integrate_converged(integrand, rtol=1e-13, atol=0.0)
    i0 = bessel_i0(kappa)
    return 4.0 * math.pi**2 * kappa**2 / (3.0 * i0 * i0) * integral


def table1(kappas=TAU_GRID_KAPPAS, mus=TAU_GRID_MUS) -> list[tuple[float, float, float]]:
    """``(kappa, mu, tau_f)`` over the grid, mu-major like the printed layout."""
    return [(k, m, tau_f(k, m)) for m in mus for k in kappas]


# -- conditional motif probabilities ---------------------------------------


class MotifKind(str, enum.Enum):
    """Subgraph patterns anchored at node 1 (position x).

    Three-edge-path and triangle-plus-edge name one representative of the
    families whose members share a leading term.
    """

    EDGE = "edge"  # A12
    CHERRY = "cherry"  # A12 A13
    PATH = "path"  # A12 A23
    TRIANGLE = "triangle"  # A12 A13 A23
    THREE_EDGE_PATH = "three_edge_path"  # A12 A23 A24
    TRIANGLE_PLUS_EDGE = "triangle_plus_edge"  # A12 A13 A23 A34


EXACT_MOTIFS = (MotifKind.EDGE, MotifKind.CHERRY, MotifKind.PATH, MotifKind.TRIANGLE)

_START = 64
_MAX = 4096
_RTOL = 1e-13


def _arc_mass(d: PeriodicDensity, a: np.ndarray, b: np.ndarray, panels: int) -> np.ndarray:
    """``int_a^b f`` for arrays of limits, Simpson on `panels` panels each."""
    t = np.linspace(0.0, 1.0, panels + 1)
    w = simpson_weights(panels)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    vals = d.eval(a + (b - a) * t)
    return (b[..., 0] - a[..., 0]) * (vals @ w)


def _outer(d: PeriodicDensity, lo: float, hi: float, panels: int, inner: Callable[[np.ndarray], np.ndarray]) -> float:
    u = np.linspace(lo, hi, panels + 1)
    return float((hi - lo) * np.dot(simpson_weights(panels), d.eval(u) * inner(u)))


def _refine(compute: Callable[[int], float]) -> float:
    panels = _START
    prev = compute(panels)
    while panels < _MAX:
        panels *= 2
        cur = compute(panels)
        if abs(cur - prev) <= _RTOL * abs(cur):
            return cur
        prev = cur
    return prev


def _edge(d, x, r, m):
    return float(_arc_mass(d, x - r, x + r, m))


def _path(d, x, r, m):
    return _outer(d, x - r, x + r, m, lambda y: _arc_mass(d, y - r, y + r, m))


def _triangle(d, x, r, m):
    # X2 = x + u.  For u <= 0 the lens leaves X3 in [x - r, x + u + r];
    # for u >= 0 in [x + u - r, x + r].  Splitting at u = 0 keeps both
    # inner integrals smooth in u.
    below = _outer(d, x - r, x, m, lambda y: _arc_mass(d, np.full_like(y, x - r), y + r, m))
    above = _outer(d, x, x + r, m, lambda y: _arc_mass(d, y - r, np.full_like(y, x + r), m))
    return below + above


def motif_prob_exact(d: PeriodicDensity, x: float, r: float, motif: MotifKind | str) -> float:
    """Conditional probability of the motif given ``X_1 = x``, by nested quadrature.

    Supported motifs: edge, cherry, path, triangle.  Requires ``0 < r <= 0.1``.
    """
    motif = MotifKind(motif)
    if not (0.0 < r <= EXACT_MAX_RADIUS):
        raise RadiusOutOfRange(f"exact motif probabilities need 0 < r <= {EXACT_MAX_RADIUS}, got {r!r}")
    x = float(x)
    if motif is MotifKind.EDGE:
        return _refine(lambda m: _edge(d, x, r, m))
    if motif is MotifKind.CHERRY:
        return _refine(lambda m: _edge(d, x, r, m)) ** 2
    if motif is MotifKind.PATH:
        return _refine(lambda m: _path(d, x, r, m))
    if motif is MotifKind.TRIANGLE:
        return _refine(lambda m: _triangle(d, x, r, m))
    raise ValueError(f"no exact quadrature for motif {motif.value!r}")


def motif_prob_asymptotic(d: PeriodicDensity, x, r: float, motif: MotifKind | str):
    """Leading-order polynomial in r for the conditional motif probability."""
    motif = MotifKind(motif)
    f = d.eval(x)
    if motif is MotifKind.THREE_EDGE_PATH:
        return 8.0 * r**3 * f**3
    if motif is MotifKind.TRIANGLE_PLUS_EDGE:
        return 6.0 * r**3 * f**3
    f2 = d.deriv(x, 2)
    if motif is MotifKind.EDGE:
        return 2.0 * r * f + f2 * r**3 / 3.0
    if motif is MotifKind.CHERRY:
        return 4.0 * r**2 * f**2 + 4.0 * r**4 / 3.0 * f * f2
    f1 = d.deriv(x, 1)
    if motif is MotifKind.PATH:
        return 4.0 * r**2 * f**2 + r**4 / 3.0 * (4.0 * f1**2 + 6.0 * f * f2)
    return 3.0 * r**2 * f**2 + 5.0 * r**4 / 12.0 * (f1**2 + 2.0 * f * f2)


def observed_order(err_large: float, err_small: float, r_large: float, r_small: float) -> float:
    """Empirical convergence order ``log(e1/e2) / log(r1/r2)``; NaN if undefined."""
    if err_large <= 0 or err_small <= 0:
        return math.nan
    return math.log(err_large / err_small) / math.log(r_large / r_small)
