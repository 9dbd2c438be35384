"""
Poisson integrals, energies and the discrete Hilbert transform
"""

from .hilbert import cross_kernel, flipped_kernel_sign, hilbert_apply, hilbert_matrix, pairing, set_kernel_sign
from .lemma import monotonicity_check, taylor_refinement
from .poisson import energy, energy_of_atoms, node_energy_squared, poisson, poisson_kernel, poisson_matrix

__all__ = [
    "poisson",
    "poisson_kernel",
    "poisson_matrix",
    "energy",
    "energy_of_atoms",
    "node_energy_squared",
    "hilbert_apply",
    "hilbert_matrix",
    "cross_kernel",
    "pairing",
    "flipped_kernel_sign",
    "set_kernel_sign",
    "monotonicity_check",
    "taylor_refinement",
]
