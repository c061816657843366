"""Composite Simpson quadrature with panel doubling.

Integrands are vectorized callables: they receive a 1-d float array of
abscissae and return an array of the same shape.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NonFiniteIntegrand

Integrand = Callable[[np.ndarray], np.ndarray]

START_PANELS = 64
MAX_PANELS = 2**20
DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-15


def simpson_weights(panels: int) -> np.ndarray:
    """Composite Simpson weights for `panels` equal panels on a unit-length interval."""
    if panels < 2 or panels % 2:
        raise ValueError(f"panels must be an even integer >= 2, got {panels}")
    w = np.empty(panels + 1)
    w[0::2] = 2.0
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w / (3.0 * panels)


def simpson(fn: Integrand, a: float, b: float, panels: int) -> float:
    x = np.linspace(a, b, panels + 1)
    y = np.asarray(fn(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteIntegrand(f"integrand is not finite on [{a}, {b}]")
    return float((b - a) * np.dot(simpson_weights(panels), y))


def integrate_periodic(fn: Integrand, panels: int) -> float:
    """Composite Simpson estimate of the integral of `fn` over [0, 1]."""
    return simpson(fn, 0.0, 1.0, panels)


def integrate_converged(
    fn: Integrand,
    a: float = 0.0,
    b: float = 1.0,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    start: int = START_PANELS,
    max_panels: int = MAX_PANELS,
) -> float:
    """Double the panel count until two successive Simpson estimates agree.

    Stops when ``|S(2m) - S(m)| <= rtol * |S(2m)| + atol`` or when the
    panel cap is reached; in the latter case the finest estimate is
    returned.
    """
    panels = start
    prev = simpson(fn, a, b, panels)
    while panels < max_panels:
        panels *= 2
        cur = simpson(fn, a, b, panels)
        if abs(cur - prev) <= rtol * abs(cur) + atol:
            return cur
        prev = cur
    return prev
