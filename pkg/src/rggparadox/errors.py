"""Exception types raised across the package."""


class RGGError(Exception):
    """Base class for every error raised by rggparadox."""


class InvalidDensity(RGGError, ValueError):
    """A density failed normalization, periodicity or positivity checks."""


class RadiusOutOfRange(RGGError, ValueError):
    """Connection radius outside the range accepted by the operation."""


class InfeasibleRadius(RadiusOutOfRange):
    """A radius rule produced r outside (0, 0.5] for some n."""


class TooLargeForOracle(RGGError, ValueError):
    """The O(n^2) brute-force oracle refuses inputs above its size guard."""


class SampleBudgetTooSmall(RGGError, ValueError):
    """Monte Carlo sample budget below the minimum."""


class NonFiniteIntegrand(RGGError, ArithmeticError):
    """A quadrature integrand returned NaN or infinity."""
