"""
Masses of atomic weights on dyadic intervals
"""

import logging
import math
from fractions import Fraction
from typing import Dict

import numpy as np

from models.data_models import DyadicInterval, Weight, WeightPair, format_position
from models.errors import ConfigurationError, DomainError

from .tree import DyadicTree

logger = logging.getLogger(__name__)


def mass(weight: Weight, interval: DyadicInterval) -> float:
    """Sum of the masses of atoms with position in [left(I), right(I))"""
    return math.fsum(weight.masses[weight.interval_slice(interval)])


class TreeIndex:
    """Atom bookkeeping of one weight on one tree

    Atoms are sorted, so the atoms of any dyadic interval form a contiguous run;
    `bounds(level)[k]:bounds(level)[k+1]` is the run of interval (level, k).
    """

    def __init__(self, weight: Weight, tree: DyadicTree):
        self.weight = weight
        self.tree = tree
        scale = 1 << tree.depth
        leaves = []
        for position in weight.exact_positions:
            scaled = position * scale
            if scaled.denominator == 1:
                raise DomainError(
                    f"Atom at {format_position(position)} sits on an endpoint of a depth-{tree.depth} dyadic interval"
                )
            leaves.append(math.floor(scaled))
        self.leaf = np.array(leaves, dtype=np.int64)
        self.cumulative_mass = np.concatenate([[0.0], np.cumsum(weight.masses)])
        self._bounds: Dict[int, np.ndarray] = {}
        self._node_bounds = None

    def bounds(self, level: int) -> np.ndarray:
        if level not in self._bounds:
            ancestors = self.leaf >> (self.tree.depth - level)
            self._bounds[level] = np.searchsorted(ancestors, np.arange((1 << level) + 1), side="left")
        return self._bounds[level]

    def node_bounds(self):
        """(lo, hi) atom-run bounds for every heap id"""
        if self._node_bounds is None:
            levels = [self.bounds(level) for level in range(self.tree.depth + 1)]
            lo = np.concatenate([b[:-1] for b in levels])
            hi = np.concatenate([b[1:] for b in levels])
            self._node_bounds = (lo, hi)
        return self._node_bounds

    def node_masses(self) -> np.ndarray:
        lo, hi = self.node_bounds()
        return self.cumulative_mass[hi] - self.cumulative_mass[lo]

    def level_masses(self, level: int) -> np.ndarray:
        b = self.bounds(level)
        return self.cumulative_mass[b[1:]] - self.cumulative_mass[b[:-1]]

    def atom_slice(self, interval: DyadicInterval) -> slice:
        self.tree.check(interval)
        b = self.bounds(interval.level)
        return slice(int(b[interval.index]), int(b[interval.index + 1]))

    def mass(self, interval: DyadicInterval) -> float:
        s = self.atom_slice(interval)
        return float(self.cumulative_mass[s.stop] - self.cumulative_mass[s.start])

    def weighted_cumsum(self, values: np.ndarray) -> np.ndarray:
        """Prefix sums of m_i·values_i with a leading zero"""
        return np.concatenate([[0.0], np.cumsum(self.weight.masses * values)])

    def membership(self, interval: DyadicInterval) -> np.ndarray:
        indicator = np.zeros(len(self.weight))
        indicator[self.atom_slice(interval)] = 1.0
        return indicator

    @property
    def resolves(self) -> bool:
        """True when every leaf carries at most one atom"""
        return bool(np.all(np.diff(self.leaf) > 0))


def translate_pair(pair: WeightPair, shift: Fraction, tree: DyadicTree) -> WeightPair:
    """Shift both weights modulo 1, emulating a translated grid"""
    moved = pair.translate(Fraction(shift))
    try:
        TreeIndex(moved.sigma, tree)
        TreeIndex(moved.w, tree)
    except DomainError as e:
        raise ConfigurationError(f"Shift {shift} is incompatible with the depth-{tree.depth} grid: {e}")
    logger.debug(f"Translated pair by {shift}")
    return moved
