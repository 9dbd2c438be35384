"""
Finite dyadic tree under the root interval [0,1)
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from models.data_models import DyadicInterval
from models.errors import ConfigurationError, DomainError

MAX_DEPTH = 24


@dataclass(frozen=True)
class DyadicTree:
    """All dyadic intervals of [0,1) down to `depth`, addressed in heap order"""

    depth: int

    def __post_init__(self):
        if int(self.depth) != self.depth or not 1 <= self.depth <= MAX_DEPTH:
            raise ConfigurationError(f"Tree depth must be an integer in [1, {MAX_DEPTH}], got {self.depth}")

    @property
    def root(self) -> DyadicInterval:
        return DyadicInterval.root()

    @property
    def size(self) -> int:
        return (1 << (self.depth + 1)) - 1

    def __len__(self) -> int:
        return self.size

    def __contains__(self, interval: DyadicInterval) -> bool:
        return isinstance(interval, DyadicInterval) and interval.level <= self.depth

    def check(self, interval: DyadicInterval) -> DyadicInterval:
        if interval not in self:
            raise DomainError(f"{interval} (level {interval.level}) is not in a depth-{self.depth} tree")
        return interval

    def intervals(self) -> Iterator[DyadicInterval]:
        """Every interval, coarse to fine"""
        for level in range(self.depth + 1):
            yield from self.level(level)

    def level(self, level: int) -> Iterator[DyadicInterval]:
        for index in range(1 << level):
            yield DyadicInterval(level, index)

    def subtree(self, interval: DyadicInterval) -> Iterator[DyadicInterval]:
        """interval and all its descendants in the tree, coarse to fine"""
        self.check(interval)
        for level in range(interval.level, self.depth + 1):
            shift = level - interval.level
            for index in range(interval.index << shift, (interval.index + 1) << shift):
                yield DyadicInterval(level, index)

    def level_ids(self, level: int) -> np.ndarray:
        """Heap ids of the intervals at one level"""
        return np.arange((1 << level) - 1, (1 << (level + 1)) - 1)

    def subtree_ids(self, interval: DyadicInterval, level: int) -> np.ndarray:
        """Heap ids of the descendants of interval at a given finer level"""
        shift = level - interval.level
        start = (1 << level) - 1 + (interval.index << shift)
        return np.arange(start, start + (1 << shift))

    @cached_property
    def node_levels(self) -> np.ndarray:
        return np.concatenate([np.full(1 << level, level) for level in range(self.depth + 1)])

    @cached_property
    def node_indices(self) -> np.ndarray:
        return np.concatenate([np.arange(1 << level) for level in range(self.depth + 1)])

    @cached_property
    def node_lengths(self) -> np.ndarray:
        return np.ldexp(1.0, -self.node_levels)

    @cached_property
    def node_lefts(self) -> np.ndarray:
        return self.node_indices * self.node_lengths

    def is_leaf(self, interval: DyadicInterval) -> bool:
        return self.check(interval).level == self.depth


def build_tree(depth: int) -> DyadicTree:
    """Build the dyadic tree of the given depth"""
    return DyadicTree(depth)
