"""
Stopping-time (corona) constructions and the regroupings of the nested form along them
"""

from .stopping import CZ_THRESHOLD, classify_pair, f_stopping_tree, j_star_family, maximal_below, quasi_orthogonality
from .split import corona_projections, cz_corona_split
from .bf import (
    BF_FAMILIES,
    bf_function,
    bf_reduction_check,
    fluctuation,
    stop_form,
    stop_form_matrix,
    stop_form_terms,
    telescoping_function,
)
from .dini import DINI_THRESHOLD, PACKING_BOUND, dini_stopping_tree, nontrivial_dini_tree, packing_holds, stop_form_split

__all__ = [
    "CZ_THRESHOLD",
    "DINI_THRESHOLD",
    "PACKING_BOUND",
    "BF_FAMILIES",
    "f_stopping_tree",
    "quasi_orthogonality",
    "classify_pair",
    "j_star_family",
    "maximal_below",
    "cz_corona_split",
    "corona_projections",
    "stop_form",
    "stop_form_terms",
    "stop_form_matrix",
    "fluctuation",
    "bf_function",
    "bf_reduction_check",
    "telescoping_function",
    "dini_stopping_tree",
    "nontrivial_dini_tree",
    "packing_holds",
    "stop_form_split",
]
