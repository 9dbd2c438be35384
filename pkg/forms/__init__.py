"""
The bilinear form, its splitting cascade, norms and interval constants
"""

from .norms import FormMatrix, assemble, form_norm, full_matrix, operator_norm, power_iteration
from .schur import decay_bound, decay_exponent, max_ratio_by_s, poisson_decay_check, schur_sum
from .split import (
    FormContext,
    class_masks,
    classify,
    full_form,
    node_means,
    split_form,
    swapped_context,
    theorem_remainder,
)
from .testing import a2_at, a2_candidates, a2_constant, testing_constants, weak_boundedness

__all__ = [
    "FormContext",
    "classify",
    "class_masks",
    "node_means",
    "full_form",
    "split_form",
    "swapped_context",
    "theorem_remainder",
    "FormMatrix",
    "assemble",
    "form_norm",
    "full_matrix",
    "operator_norm",
    "power_iteration",
    "weak_boundedness",
    "testing_constants",
    "a2_constant",
    "a2_candidates",
    "a2_at",
    "schur_sum",
    "poisson_decay_check",
    "decay_bound",
    "decay_exponent",
    "max_ratio_by_s",
]
