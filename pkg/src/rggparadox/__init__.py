"""Friendship paradox index on circular random geometric graphs."""

from .density import PeriodicDensity, Tabulated, Uniform, VonMises, bessel_i, bessel_i0, make_density
from .errors import (
    InfeasibleRadius,
    InvalidDensity,
    NonFiniteIntegrand,
    RadiusOutOfRange,
    SampleBudgetTooSmall,
    TooLargeForOracle,
)
from .moments import MomentEstimate, boundary_sweep, estimate_motif
from .paradox import ParadoxResult, friendship_index, friendship_paradox
from .rgg import CircularRGG, NodePositions, build_graph, circ_dist, naive_adjacency
from .theory import MotifKind, Prediction, expected_fn, motif_prob_asymptotic, motif_prob_exact, table1, tau_f

__version__ = "0.1.0"

__all__ = [
    "CircularRGG",
    "InfeasibleRadius",
    "InvalidDensity",
    "MomentEstimate",
    "MotifKind",
    "NodePositions",
    "NonFiniteIntegrand",
    "ParadoxResult",
    "PeriodicDensity",
    "Prediction",
    "RadiusOutOfRange",
    "SampleBudgetTooSmall",
    "Tabulated",
    "TooLargeForOracle",
    "Uniform",
    "VonMises",
    "bessel_i",
    "bessel_i0",
    "boundary_sweep",
    "build_graph",
    "circ_dist",
    "estimate_motif",
    "expected_fn",
    "friendship_index",
    "friendship_paradox",
    "make_density",
    "motif_prob_asymptotic",
    "motif_prob_exact",
    "naive_adjacency",
    "table1",
    "tau_f",
]
