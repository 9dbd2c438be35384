"""
Good and bad dyadic intervals

Distances are exact: every boundary distance is an integer multiple of |J|, so the
comparison d ≥ |J|^ε|I|^{1−ε} reduces to units ≥ 2^{(1−ε)·gap} with gap = log2(|I|/|J|),
checked in the log domain with a 1e-12 guard band (ties count as good).
"""

import math
from functools import lru_cache

import numpy as np

from models.data_models import DyadicInterval, GoodnessParams
from models.errors import DomainError

from .tree import DyadicTree

LOG_GUARD = 1e-12
LN2 = math.log(2.0)


def _far_enough(units: int, gap: int, epsilon: float) -> bool:
    if units <= 0:
        return False
    return math.log(units) >= (1.0 - epsilon) * gap * LN2 - LOG_GUARD


def _units_to_boundary(index: int, gap: int) -> int:
    """Distance, in units of |J|, from J to the boundary of its ancestor `gap` levels up"""
    t = index & ((1 << gap) - 1)
    return min(t, (1 << gap) - 1 - t)


def _ancestor_gaps(level: int, params: GoodnessParams):
    """(I-gap, boundary-ancestor gap) pairs constraining an interval at `level`"""
    if params.form == "children":
        # |I| ≥ 2^{r+1}|J|; the nearest boundary sits on the child of I containing J
        return [(level - i, level - i - 1) for i in range(0, level - params.r)]
    return [(level - i, level - i) for i in range(0, level - params.r + 1)]


def is_good(interval: DyadicInterval, params: GoodnessParams, tree: DyadicTree) -> bool:
    """Goodness of J relative to every much longer interval of the tree"""
    tree.check(interval)
    for gap, boundary_gap in _ancestor_gaps(interval.level, params):
        units = _units_to_boundary(interval.index, boundary_gap)
        if not _far_enough(units, gap, params.epsilon):
            return False
    return True


def is_good_pair(outer: DyadicInterval, inner: DyadicInterval, params: GoodnessParams) -> bool:
    """Two-interval goodness: |J| ≤ 2^{-r}|I| forces dist(J, ∂I) ≥ |J|^ε|I|^{1−ε}"""
    if not outer.contains(inner):
        raise DomainError(f"{inner} is not inside {outer}")
    gap = inner.level - outer.level
    if gap < params.r:
        return True
    return _far_enough(_units_to_boundary(inner.index, gap), gap, params.epsilon)


@lru_cache(maxsize=64)
def _goodness_mask(depth: int, epsilon: float, r: int, form: str) -> np.ndarray:
    params = GoodnessParams(epsilon, r, form)
    threshold = {}
    masks = []
    for level in range(depth + 1):
        index = np.arange(1 << level)
        good = np.ones(1 << level, dtype=bool)
        for gap, boundary_gap in _ancestor_gaps(level, params):
            t = index & ((1 << boundary_gap) - 1)
            units = np.minimum(t, (1 << boundary_gap) - 1 - t)
            if gap not in threshold:
                threshold[gap] = (1.0 - epsilon) * gap * LN2 - LOG_GUARD
            with np.errstate(divide="ignore"):
                good &= (units > 0) & (np.log(np.maximum(units, 1)) >= threshold[gap])
        masks.append(good)
    mask = np.concatenate(masks)
    mask.setflags(write=False)
    return mask


def goodness_mask(tree: DyadicTree, params: GoodnessParams) -> np.ndarray:
    """is_good for every heap id of the tree"""
    return _goodness_mask(tree.depth, params.epsilon, params.r, params.form)


@lru_cache(maxsize=256)
def _pair_offsets(gap: int, epsilon: float, r: int) -> np.ndarray:
    if gap < r:
        mask = np.ones(1 << gap, dtype=bool)
    else:
        t = np.arange(1 << gap)
        units = np.minimum(t, (1 << gap) - 1 - t)
        mask = (units > 0) & (np.log(np.maximum(units, 1)) >= (1.0 - epsilon) * gap * LN2 - LOG_GUARD)
    mask.setflags(write=False)
    return mask


def pair_goodness_offsets(gap: int, params: GoodnessParams) -> np.ndarray:
    """is_good_pair(I, K) for every descendant K of I `gap` levels down, indexed by relative position"""
    return _pair_offsets(gap, params.epsilon, params.r)
