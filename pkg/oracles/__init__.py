"""
Exhaustive references for the dynamic programs, the testing sums and the stopping scans on shallow trees
"""

from .exhaustive import (
    MAX_EXHAUSTIVE_HEIGHT,
    best_family,
    brute_force_corona_class,
    brute_force_parent,
    dense_a2,
    endpoint_grid,
    exhaustive_dini_constant,
    exhaustive_dini_stopping_tree,
    exhaustive_energy_constant,
    exhaustive_f_stopping_tree,
    exhaustive_psi_table,
    exhaustive_weak_boundedness,
    family_masks,
    grid_testing_constants,
    maximal_scan,
)

__all__ = [
    "MAX_EXHAUSTIVE_HEIGHT",
    "family_masks",
    "best_family",
    "maximal_scan",
    "endpoint_grid",
    "dense_a2",
    "exhaustive_energy_constant",
    "exhaustive_psi_table",
    "exhaustive_dini_constant",
    "exhaustive_weak_boundedness",
    "grid_testing_constants",
    "exhaustive_f_stopping_tree",
    "exhaustive_dini_stopping_tree",
    "brute_force_parent",
    "brute_force_corona_class",
]
