"""
Dyadic tree, atomic weights, goodness and weight families
"""

from .families import FAMILY_KINDS, WeightFamilySpec, generate_weight, leaf_positions, load_atoms, weight_from_spec
from .goodness import goodness_mask, is_good, is_good_pair, pair_goodness_offsets
from .measure import TreeIndex, mass, translate_pair
from .tree import MAX_DEPTH, DyadicTree, build_tree

__all__ = [
    "DyadicTree",
    "MAX_DEPTH",
    "build_tree",
    "mass",
    "TreeIndex",
    "translate_pair",
    "is_good",
    "is_good_pair",
    "goodness_mask",
    "pair_goodness_offsets",
    "FAMILY_KINDS",
    "WeightFamilySpec",
    "generate_weight",
    "leaf_positions",
    "load_atoms",
    "weight_from_spec",
]
