"""
Operator norms of the form and of its class-restricted pieces
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from dyadic.tree import DyadicTree
from kernels.hilbert import cross_kernel
from models.data_models import DyadicInterval, GoodnessParams, PairClass, WeightPair
from models.errors import ConfigurationError

from .split import EXPANDS_TO, FormContext, swapped_context

logger = logging.getLogger(__name__)

SVD_LIMIT = 1024
POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
CROSS_CHECK_TOL = 1e-8
NORM_MAX_DEPTH = 12

ClassSubset = Union[str, Iterable[Union[PairClass, str]]]


def power_iteration(matrix: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER, seed: int = 0) -> float:
    """Largest singular value by power iteration on AᵀA from a seeded start"""
    if matrix.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(matrix.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for iteration in range(max_iter):
        u = matrix @ v
        previous, estimate = estimate, float(np.linalg.norm(u))
        v_next = matrix.T @ u
        norm = np.linalg.norm(v_next)
        if norm == 0.0:
            return 0.0
        v = v_next / norm
        if abs(estimate - previous) <= tol * max(estimate, 1e-300):
            logger.debug(f"Power iteration converged after {iteration + 1} steps")
            break
    else:
        logger.info(f"Power iteration hit the {max_iter}-step cap at {estimate}")
    return estimate


def operator_norm(matrix: np.ndarray, method: str = "auto", cross_check: bool = False) -> float:
    """Largest singular value: SVD up to dimension 1024, power iteration beyond"""
    if matrix.size == 0 or not np.any(matrix):
        return 0.0
    if method == "auto":
        method = "svd" if max(matrix.shape) <= SVD_LIMIT else "power"
    if method == "svd":
        value = float(np.linalg.svd(matrix, compute_uv=False)[0])
    elif method == "power":
        value = power_iteration(matrix)
    else:
        raise ConfigurationError(f"Unknown norm method {method!r}; expected 'auto', 'svd' or 'power'")
    if cross_check:
        other = power_iteration(matrix) if method == "svd" else float(np.linalg.svd(matrix, compute_uv=False)[0])
        if abs(other - value) > CROSS_CHECK_TOL * max(value, 1e-300):
            logger.warning(f"Norm methods disagree: {value} versus {other}")
    return value


@dataclass
class FormMatrix:
    """A form in Haar coordinates: rows are w-side intervals J, columns σ-side intervals I"""

    matrix: np.ndarray
    rows: List[DyadicInterval]
    columns: List[DyadicInterval]
    classes: Sequence[str] = field(default_factory=tuple)
    _norm: Optional[float] = field(default=None, repr=False)

    def norm(self, method: str = "auto", cross_check: bool = False) -> float:
        if self._norm is None or cross_check:
            self._norm = operator_norm(self.matrix, method, cross_check)
        return self._norm

    def restrict(self, row_mask: np.ndarray, column_mask: np.ndarray) -> "FormMatrix":
        rows = [J for J, keep in zip(self.rows, row_mask) if keep]
        columns = [I for I, keep in zip(self.columns, column_mask) if keep]
        return FormMatrix(self.matrix[np.ix_(row_mask, column_mask)], rows, columns, self.classes)


def _parse_classes(subset: ClassSubset) -> List[str]:
    if isinstance(subset, str):
        return [subset]
    return [c.value if isinstance(c, PairClass) else str(c) for c in subset]


def full_matrix(pair: WeightPair, delta: float = 0.0) -> np.ndarray:
    """√(w_j σ_i)/(y_j − x_i): its norm is the norm of B on L²(σ) × L²(w)"""
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return np.zeros((len(pair.w), len(pair.sigma)))
    G = cross_kernel(pair.w, pair.sigma, delta)
    return np.sqrt(pair.w.masses)[:, None] * G * np.sqrt(pair.sigma.masses)[None, :]


def assemble(ctx: FormContext, subset: ClassSubset, params: GoodnessParams, good: bool = True) -> FormMatrix:
    """FormMatrix of a class subset; 'sub' is B_⋐ and 'sup' is B_⋑"""
    ctx.with_params(params)
    names = _parse_classes(subset)
    components = []
    for name in names:
        if name in ("sub", "sup"):
            components.append(name)
            continue
        try:
            components.extend(c.value for c in EXPANDS_TO[PairClass(name)])
        except ValueError:
            raise ConfigurationError(f"Unknown pair class {name!r}")
    components = sorted(set(components))

    matrix = np.zeros((len(ctx.w_basis), len(ctx.sigma_basis)))
    for name in components:
        if name == "sub":
            matrix = matrix + ctx.entries[PairClass.B32]
        elif name == "sup":
            swapped = swapped_context(ctx)
            matrix = matrix - swapped.entries[PairClass.B32].T
        else:
            matrix = matrix + ctx.entries[PairClass(name)]

    form = FormMatrix(matrix, list(ctx.w_basis.intervals), list(ctx.sigma_basis.intervals), tuple(components))
    if good:
        form = form.restrict(ctx.w_basis.good_columns(params), ctx.sigma_basis.good_columns(params))
    return form


def form_norm(
    pair: WeightPair,
    class_subset: ClassSubset,
    params: GoodnessParams,
    tree: DyadicTree,
    good: bool = True,
    method: str = "auto",
    cross_check: bool = False,
    context: Optional[FormContext] = None,
) -> float:
    """Operator norm of the full form ('full') or of a class-restricted piece"""
    if tree.depth > NORM_MAX_DEPTH:
        raise ConfigurationError(f"Norm computations are limited to depth {NORM_MAX_DEPTH}, got {tree.depth}")
    if isinstance(class_subset, str) and class_subset == "full":
        return operator_norm(full_matrix(pair), method, cross_check)
    if not isinstance(class_subset, str) and len(list(_parse_classes(class_subset))) == 0:
        return 0.0
    ctx = context or FormContext(pair, tree, r=params.r)
    return assemble(ctx, class_subset, params, good).norm(method, cross_check)
