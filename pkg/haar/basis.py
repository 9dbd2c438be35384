"""
Weighted Haar basis, analysis and synthesis

h_I = sqrt(m₋m₊/(m₋+m₊))·(1_{I₋}/m₋ − 1_{I₊}/m₊) exists only when both children of I
carry mass. Leaves of the tree have no children, so a weight with several atoms in one
leaf is only resolved down to its leaf averages.
"""

import logging
import math
from typing import Dict, List, Optional

import numpy as np

from dyadic.goodness import goodness_mask
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from models.data_models import DyadicInterval, GoodnessParams, HaarCoefficients, Weight, WeightedFunction
from models.errors import DomainError, UndefinedHaarError

logger = logging.getLogger(__name__)


def _child_masses(weight: Weight, interval: DyadicInterval):
    masses = weight.masses
    left = math.fsum(masses[weight.interval_slice(interval.left_child)])
    right = math.fsum(masses[weight.interval_slice(interval.right_child)])
    return left, right


def haar_scale(left_mass, right_mass):
    return np.sqrt(left_mass * right_mass / (left_mass + right_mass))


def haar_function(weight: Weight, interval: DyadicInterval) -> WeightedFunction:
    """h^σ_I evaluated at every atom of the weight"""
    left, right = _child_masses(weight, interval)
    if left <= 0 or right <= 0:
        raise UndefinedHaarError(f"Haar function on {interval} needs two massive children (masses {left}, {right})")
    scale = float(haar_scale(left, right))
    values = np.zeros(len(weight))
    values[weight.interval_slice(interval.left_child)] = scale / left
    values[weight.interval_slice(interval.right_child)] = -scale / right
    return WeightedFunction(weight, values)


def expectation(weight: Weight, f: WeightedFunction, interval: DyadicInterval) -> float:
    """E^σ_I f, or 0 when I carries no mass"""
    s = weight.interval_slice(interval)
    total = math.fsum(weight.masses[s])
    if total <= 0:
        return 0.0
    return float(np.dot(weight.masses[s], f.values[s]) / total)


def martingale_difference(
    weight: Weight, f: WeightedFunction, interval: DyadicInterval, tree: Optional[DyadicTree] = None
) -> WeightedFunction:
    """Δ^σ_I f = 1_{I₊}E_{I₊}f + 1_{I₋}E_{I₋}f − 1_I E_I f"""
    if tree is not None and tree.is_leaf(interval):
        raise DomainError(f"{interval} is a leaf of the depth-{tree.depth} tree")
    values = np.zeros(len(weight))
    mean = expectation(weight, f, interval)
    for child in interval.children():
        s = weight.interval_slice(child)
        if s.stop > s.start:
            values[s] = expectation(weight, f, child) - mean
    return WeightedFunction(weight, values)


class HaarBasis:
    """Dense Haar matrix of one weight on one tree

    Column c of `matrix` holds h_I at every atom for I = intervals[c]; intervals are in
    heap order. lo/mid/hi are the atom-run bounds of I₋ = [lo, mid) and I₊ = [mid, hi).
    """

    def __init__(self, weight: Weight, tree: DyadicTree):
        self.weight = weight
        self.tree = tree
        self.index = TreeIndex(weight, tree)
        cum = self.index.cumulative_mass

        ids, lo, mid, hi = [], [], [], []
        for level in range(tree.depth):
            b = self.index.bounds(level + 1)
            left_lo, left_hi, right_hi = b[0:-1:2], b[1::2], b[2::2]
            left_mass = cum[left_hi] - cum[left_lo]
            right_mass = cum[right_hi] - cum[left_hi]
            valid = np.nonzero((left_mass > 0) & (right_mass > 0))[0]
            ids.append((1 << level) - 1 + valid)
            lo.append(left_lo[valid])
            mid.append(left_hi[valid])
            hi.append(right_hi[valid])

        self.ids = np.concatenate(ids).astype(np.int64) if ids else np.zeros(0, dtype=np.int64)
        self.lo = np.concatenate(lo).astype(np.int64) if lo else np.zeros(0, dtype=np.int64)
        self.mid = np.concatenate(mid).astype(np.int64) if mid else np.zeros(0, dtype=np.int64)
        self.hi = np.concatenate(hi).astype(np.int64) if hi else np.zeros(0, dtype=np.int64)
        self.left_mass = cum[self.mid] - cum[self.lo]
        self.right_mass = cum[self.hi] - cum[self.mid]
        scale = haar_scale(self.left_mass, self.right_mass)
        self.left_value = scale / self.left_mass
        self.right_value = -scale / self.right_mass
        self.levels = tree.node_levels[self.ids]
        self.intervals: List[DyadicInterval] = [DyadicInterval.from_node_id(int(n)) for n in self.ids]
        self.position: Dict[DyadicInterval, int] = {interval: c for c, interval in enumerate(self.intervals)}

        self.matrix = np.zeros((len(weight), len(self.intervals)))
        for c in range(len(self.intervals)):
            self.matrix[self.lo[c] : self.mid[c], c] = self.left_value[c]
            self.matrix[self.mid[c] : self.hi[c], c] = self.right_value[c]
        logger.debug(f"Haar basis: {len(self.intervals)} functions for {len(weight)} atoms at depth {tree.depth}")

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def resolved(self) -> bool:
        return self.index.resolves

    def coefficient_vector(self, f: WeightedFunction) -> np.ndarray:
        """⟨f, h_I⟩ for every column, from prefix sums of m·f"""
        cum = self.index.weighted_cumsum(f.values)
        left_sum = cum[self.mid] - cum[self.lo]
        right_sum = cum[self.hi] - cum[self.mid]
        return self.left_value * left_sum + self.right_value * right_sum

    def to_coefficients(self, vector: np.ndarray, root_mean: float) -> HaarCoefficients:
        coeffs = {interval: float(v) for interval, v in zip(self.intervals, vector) if v != 0.0}
        return HaarCoefficients(float(root_mean), coeffs, self.weight.total_mass)

    def from_coefficients(self, coefficients: HaarCoefficients) -> np.ndarray:
        vector = np.zeros(len(self.intervals))
        for interval, value in coefficients.coeffs.items():
            if interval not in self.position:
                raise DomainError(f"No Haar function at {interval} for this weight")
            vector[self.position[interval]] = value
        return vector

    def child_bound(self) -> np.ndarray:
        """max over both children of |E_{I±}h_I|·m±^{1/2}; never exceeds 1"""
        return np.maximum(
            np.abs(self.left_value) * np.sqrt(self.left_mass), np.abs(self.right_value) * np.sqrt(self.right_mass)
        )

    def good_columns(self, params: GoodnessParams) -> np.ndarray:
        return goodness_mask(self.tree, params)[self.ids]


def analyze(weight: Weight, f: WeightedFunction, tree: DyadicTree, basis: Optional[HaarBasis] = None) -> HaarCoefficients:
    """Weighted Haar coefficients of f plus its root average"""
    if f.weight is not weight and f.weight != weight:
        raise DomainError("Function is not defined on this weight")
    basis = basis or HaarBasis(weight, tree)
    total = weight.total_mass
    root_mean = f.integral() / total if total > 0 else 0.0
    return basis.to_coefficients(basis.coefficient_vector(f), root_mean)


def synthesize(
    coefficients: HaarCoefficients, weight: Weight, tree: DyadicTree, basis: Optional[HaarBasis] = None
) -> WeightedFunction:
    """root_mean + Σ c_I h_I at every atom"""
    basis = basis or HaarBasis(weight, tree)
    values = coefficients.root_mean + basis.matrix @ basis.from_coefficients(coefficients)
    return WeightedFunction(weight, values)


def project_good(coefficients: HaarCoefficients, params: GoodnessParams, tree: DyadicTree) -> HaarCoefficients:
    """P_good: keep only the coefficients of good intervals"""
    mask = goodness_mask(tree, params)
    kept = {interval: value for interval, value in coefficients.coeffs.items() if mask[tree.check(interval).node_id]}
    return HaarCoefficients(coefficients.root_mean, kept, coefficients.root_mass)
