"""Periodic probability densities on the unit circle [0, 1).

Three families are supported: the uniform density, the von Mises density
``exp(kappa * cos(2*pi*x - mu)) / I0(kappa)`` and densities tabulated on an
equispaced periodic grid.  Every density is validated at construction
(unit mass, periodic seam, positivity floor) and is immutable afterwards.

Sampling is by inverse CDF on a fixed cumulative table, so the number of
uniforms consumed per draw is always exactly one.
"""

from __future__ import annotations

import csv
import math
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidDensity
from .quadrature import integrate_converged
from .rgg import NodePositions

TWO_PI = 2.0 * math.pi

CDF_KNOTS = 2**14
FLOOR_PROBES = 4096
POSITIVITY_FLOOR = 1e-6
MASS_TOL = 1e-10
SEAM_TOL = 1e-10
SEAM_DERIV_TOL = 1e-8
GRID_TOL = 1e-9


def bessel_i(order: int, kappa: float) -> float:
    """Modified Bessel function of the first kind, integer order, by power series.

    Sums ``(kappa/2)**(2m + order) / (m! (m + order)!)`` until a term drops
    below 1e-16 of the running total.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    half = 0.5 * kappa
    term = half**order / math.factorial(order)
    total = term
    q = half * half
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + order))
        total += term
        if term <= 1e-16 * total:
            return total


def bessel_i0(kappa: float) -> float:
    """Normalizer of the von Mises density, ``(1/2pi) * int_0^{2pi} exp(kappa cos t) dt``."""
    if kappa == 0:
        return 1.0
    return bessel_i(0, kappa)


class PeriodicDensity:
    """Base class: a density on [0, 1) whose periodic extension is smooth.

    Subclasses implement :meth:`_g` (the periodic extension evaluated
    without reducing its argument), :meth:`_g_deriv`, and the sampling
    hooks :meth:`_base_pdf` / :attr:`sample_offset`.
    """

    kind = "abstract"
    floor = POSITIVITY_FLOOR

    # -- subclass hooks -------------------------------------------------
    def _g(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _g_deriv(self, x: np.ndarray, order: int) -> np.ndarray:
        raise NotImplementedError

    def _base_pdf(self, x: np.ndarray) -> np.ndarray:
        # Density whose samples, shifted by `sample_offset`, are draws from self.
        return self._g(x)

    sample_offset = 0.0

    # -- public API -----------------------------------------------------
    def eval(self, x):
        """Density value at ``x mod 1``. Accepts scalars or arrays."""
        arr = np.asarray(x, dtype=float)
        out = self._g(np.mod(arr, 1.0))
        return float(out) if out.ndim == 0 else out

    __call__ = eval

    def deriv(self, x, order: int = 1):
        """First or second derivative of the density at ``x mod 1``."""
        if order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {order}")
        arr = np.asarray(x, dtype=float)
        out = self._g_deriv(np.mod(arr, 1.0), order)
        return float(out) if out.ndim == 0 else out

    def fprime_sq_integral(self) -> float:
        """``int_0^1 f'(x)^2 dx``."""
        return integrate_converged(lambda t: self._g_deriv(t, 1) ** 2, rtol=1e-12)

    def shifted(self, delta: float) -> "PeriodicDensity":
        """The rotated density ``x -> f(x - delta)``."""
        raise NotImplementedError

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "kind")
        return f"{type(self).__name__}({args})"

    # -- validation -----------------------------------------------------
    def _validate(self) -> None:
        mass = integrate_converged(self._g, rtol=1e-13)
        if abs(mass - 1.0) > MASS_TOL:
            raise InvalidDensity(f"density integrates to {mass!r}, not 1")
        ends = np.array([0.0, 1.0])
        g0, g1 = self._g(ends)
        if abs(g0 - g1) > SEAM_TOL:
            raise InvalidDensity(f"density is not periodic: f(0)={g0!r}, f(1-)={g1!r}")
        d0, d1 = self._g_deriv(ends, 1)
        if abs(d0 - d1) > SEAM_DERIV_TOL:
            raise InvalidDensity(f"derivative is not periodic: f'(0)={d0!r}, f'(1-)={d1!r}")
        probes = self._g(np.arange(FLOOR_PROBES) / FLOOR_PROBES)
        low = float(probes.min())
        if not np.all(np.isfinite(probes)) or low < self.floor:
            raise InvalidDensity(f"density must stay above {self.floor:g}; minimum probe value {low!r}")

    # -- sampling -------------------------------------------------------
    @cached_property
    def cdf_table(self) -> np.ndarray:
        """Normalized cumulative masses of the base shape at knots k / CDF_KNOTS.

        Each cell is integrated by Simpson's rule using its midpoint.
        """
        h = 1.0 / CDF_KNOTS
        knots = np.arange(CDF_KNOTS + 1) * h
        mids = knots[:-1] + 0.5 * h
        fk = self._base_pdf(knots)
        cells = (h / 6.0) * (fk[:-1] + 4.0 * self._base_pdf(mids) + fk[1:])
        table = np.concatenate([[0.0], np.cumsum(cells)])
        table /= table[-1]
        table[-1] = 1.0
        return table

    def cdf(self, x):
        """CDF of the density on [0, 1), interpolated from the cumulative table."""
        arr = np.asarray(x, dtype=float)
        knots = np.linspace(0.0, 1.0, CDF_KNOTS + 1)
        # F(x) = G(x - s) - G(-s) with G the periodic base CDF extended by +1 per turn.
        s = self.sample_offset % 1.0

        def base(t):
            whole = np.floor(t)
            return whole + np.interp(t - whole, knots, self.cdf_table)

        out = base(arr - s) - base(np.asarray(-s))
        return float(out) if out.ndim == 0 else out

    def sample_array(self, rng: np.random.Generator, size) -> np.ndarray:
        """I.i.d. draws in [0, 1) with the given shape; one uniform per draw."""
        u = rng.random(size)
        table = self.cdf_table
        k = np.searchsorted(table, u, side="right") - 1
        np.clip(k, 0, CDF_KNOTS - 1, out=k)
        lo = table[k]
        width = table[k + 1] - lo
        frac = np.divide(u - lo, width, out=np.zeros_like(u), where=width > 0)
        x = (k + frac) / CDF_KNOTS
        return _wrap(x + self.sample_offset)

    def sample(self, n: int, rng: np.random.Generator) -> NodePositions:
        """Draw ``n`` node positions."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return NodePositions(self.sample_array(rng, n))


def _wrap(x: np.ndarray) -> np.ndarray:
    x = np.mod(x, 1.0)
    # np.mod can round a tiny negative value up to exactly 1.0
    x[x >= 1.0] = 0.0
    return x


class Uniform(PeriodicDensity):
    kind = "uniform"

    def __init__(self) -> None:
        self._validate()

    def _g(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def _g_deriv(self, x, order):
        return np.zeros_like(np.asarray(x, dtype=float))

    def fprime_sq_integral(self) -> float:
        return 0.0

    def shifted(self, delta: float) -> "Uniform":
        return self

    def sample_array(self, rng, size):
        return rng.random(size)

    def cdf(self, x):
        arr = np.mod(np.asarray(x, dtype=float), 1.0)
        return float(arr) if arr.ndim == 0 else arr

    def __eq__(self, other):
        return isinstance(other, Uniform)

    def __hash__(self):
        return hash("uniform")


class VonMises(PeriodicDensity):
    """``exp(kappa * cos(2*pi*x - mu)) / I0(kappa)`` on [0, 1).

    ``mu`` is the phase in radians exactly as it appears inside the cosine,
    so the mode sits at ``x = mu / (2*pi)``.  The minimum density is
    ``exp(-2 kappa)``-small, so kappa above roughly 7.9 needs a lower `floor`.
    """

    kind = "vonmises"

    def __init__(self, kappa: float, mu: float = 0.0, floor: float = POSITIVITY_FLOOR) -> None:
        self.floor = floor
        if not (kappa >= 0 and math.isfinite(kappa)):
            raise InvalidDensity(f"kappa must be a finite nonnegative number, got {kappa!r}")
        self.kappa = float(kappa)
        self.mu = float(mu)
        self.normalizer = bessel_i0(self.kappa)
        self._validate()

    @property
    def sample_offset(self) -> float:
        return self.mu / TWO_PI

    def _g(self, x):
        return np.exp(self.kappa * np.cos(TWO_PI * x - self.mu)) / self.normalizer

    def _base_pdf(self, x):
        return np.exp(self.kappa * np.cos(TWO_PI * x)) / self.normalizer

    def _g_deriv(self, x, order):
        phase = TWO_PI * x - self.mu
        f = np.exp(self.kappa * np.cos(phase)) / self.normalizer
        if order == 1:
            return -TWO_PI * self.kappa * np.sin(phase) * f
        s = np.sin(phase)
        return TWO_PI**2 * self.kappa * (self.kappa * s * s - np.cos(phase)) * f

    def shifted(self, delta: float) -> "VonMises":
        return VonMises(self.kappa, self.mu + TWO_PI * delta, self.floor)

    def describe(self):
        return {"kind": self.kind, "kappa": self.kappa, "mu": self.mu}

    def __eq__(self, other):
        return isinstance(other, VonMises) and (self.kappa, self.mu) == (other.kappa, other.mu)

    def __hash__(self):
        return hash((self.kind, self.kappa, self.mu))


class Tabulated(PeriodicDensity):
    """Density given by values on the periodic grid ``x0 + i/m``, i = 0..m-1.

    Values are linearly interpolated (periodic closure) and rescaled so the
    interpolant has unit mass.  Derivatives are central differences on the
    grid, linearly interpolated in between.
    """

    kind = "tabulated"

    def __init__(self, values, x0: float = 0.0, floor: float = POSITIVITY_FLOOR) -> None:
        self.floor = floor
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise InvalidDensity("tabulated density needs a 1-d array of at least 3 values")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidDensity("tabulated values must be finite and nonnegative")
        mean = v.mean()
        if mean <= 0:
            raise InvalidDensity("tabulated values sum to zero")
        self.values = v / mean
        self.values.setflags(write=False)
        self.x0 = float(x0) % 1.0
        m = v.size
        h = 1.0 / m
        up, down = np.roll(self.values, -1), np.roll(self.values, 1)
        self._d1 = (up - down) / (2.0 * h)
        self._d2 = (up - 2.0 * self.values + down) / (h * h)
        self._validate()

    @property
    def sample_offset(self) -> float:
        return self.x0

    @staticmethod
    def _interp(table: np.ndarray, t: np.ndarray) -> np.ndarray:
        m = table.size
        s = np.mod(np.asarray(t, dtype=float), 1.0) * m
        i = np.floor(s).astype(np.int64) % m
        frac = s - np.floor(s)
        return table[i] * (1.0 - frac) + table[(i + 1) % m] * frac

    def _g(self, x):
        return self._interp(self.values, np.asarray(x) - self.x0)

    def _base_pdf(self, x):
        return self._interp(self.values, x)

    def _g_deriv(self, x, order):
        return self._interp(self._d1 if order == 1 else self._d2, np.asarray(x) - self.x0)

    def fprime_sq_integral(self) -> float:
        # exact integral of the squared piecewise-linear interpolant
        a = self._d1
        b = np.roll(a, -1)
        return float(np.sum(a * a + a * b + b * b) / (3.0 * a.size))

    def shifted(self, delta: float) -> "Tabulated":
        return Tabulated(self.values, self.x0 + delta, self.floor)

    def describe(self):
        return {"kind": self.kind, "size": int(self.values.size), "x0": self.x0}

    @classmethod
    def from_csv(cls, path: str | Path) -> "Tabulated":
        """Load a two-column ``x, f(x)`` CSV; a header row is optional.

        The x column must be an equispaced periodic grid covering [0, 1).
        """
        rows = []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh)):
                if not row or not "".join(row).strip():
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if lineno == 0 and not rows:
                        continue
                    raise InvalidDensity(f"{path}: malformed row {lineno + 1}: {row!r}")
        if len(rows) < 3:
            raise InvalidDensity(f"{path}: need at least 3 grid points")
        xs, fs = map(np.array, zip(*rows))
        m = xs.size
        if np.any(xs < 0) or np.any(xs >= 1):
            raise InvalidDensity(f"{path}: x values must lie in [0, 1)")
        expected = xs[0] + np.arange(m) / m
        if np.max(np.abs(xs - expected)) > GRID_TOL:
            raise InvalidDensity(f"{path}: x grid is not equispaced with spacing 1/{m}")
        return cls(fs, xs[0])


def make_density(spec: dict[str, Any] | str) -> PeriodicDensity:
    """Build a density from a dict such as ``{"kind": "vonmises", "kappa": 1, "mu": 0.3}``.

    Strings are accepted as shorthand: ``uniform``, ``vonmises:KAPPA[:MU]``,
    ``csv:PATH``.
    """
    if isinstance(spec, str):
        head, _, rest = spec.partition(":")
        head = head.strip().lower()
        if head == "uniform":
            return Uniform()
        if head == "vonmises":
            parts = [p for p in rest.split(":") if p]
            if not parts:
                raise InvalidDensity("vonmises shorthand needs a kappa, e.g. vonmises:1.0")
            return VonMises(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
        if head == "csv":
            return Tabulated.from_csv(rest)
        raise InvalidDensity(f"unknown density {spec!r}")
    kind = str(spec.get("kind", "uniform")).lower()
    if kind == "uniform":
        return Uniform()
    if kind == "vonmises":
        return VonMises(float(spec.get("kappa", 0.0)), float(spec.get("mu", 0.0)))
    if kind in ("csv", "tabulated"):
        path = spec.get("path") or spec.get("density_file")
        if path is None:
            raise InvalidDensity("csv density needs a 'path'")
        return Tabulated.from_csv(path)
    raise InvalidDensity(f"unknown density kind {kind!r}")
