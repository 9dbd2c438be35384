"""
Constants of a weight pair: energy and Dini energy by dynamic programming, functional energy,
bounded fluctuation, and the evidence suite comparing them
"""

from .profile import DiniProfile
from .energy import PoissonPrefix, energy_constant, energy_weights, partition_best
from .dini import DiniTables, dini_constant, dini_functional, psi_table
from .functional import (
    SAMPLE_FAMILIES,
    adapted_basis,
    adapted_value,
    functional_energy,
    functional_energy_sup,
    sample_nonnegative,
    sampled_functions,
)
from .fluctuation import FluctuationProblem, bounded_fluctuation_constant, bounded_fluctuation_sup
from .suite import (
    EstimatorBudget,
    estimate_constants,
    exact_constants,
    doubling_energy_floor,
    doubling_floor_holds,
    pair_constants,
    theorem_inequality_suite,
)

__all__ = [
    "DiniProfile",
    "PoissonPrefix",
    "energy_constant",
    "energy_weights",
    "partition_best",
    "DiniTables",
    "dini_constant",
    "dini_functional",
    "psi_table",
    "SAMPLE_FAMILIES",
    "adapted_basis",
    "adapted_value",
    "functional_energy",
    "functional_energy_sup",
    "sample_nonnegative",
    "sampled_functions",
    "FluctuationProblem",
    "bounded_fluctuation_constant",
    "bounded_fluctuation_sup",
    "EstimatorBudget",
    "estimate_constants",
    "exact_constants",
    "doubling_energy_floor",
    "doubling_floor_holds",
    "pair_constants",
    "theorem_inequality_suite",
]
