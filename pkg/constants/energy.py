"""
Energy constant by dynamic programming over dyadic partitions

For a root I₀, best(I) = max(term(I), best(I₋) + best(I₊)) with
term(I) = P(σ·1_{I₀}, I)²·E(w, I)²·w(I); the constant is √(max best(I₀)/σ(I₀)).
"""

import logging
import math
from typing import Optional

import numpy as np

from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from kernels.poisson import node_energy_squared, poisson_matrix
from models.data_models import DyadicInterval, Weight, WeightPair

logger = logging.getLogger(__name__)


class PoissonPrefix:
    """Poisson kernels of every tree interval against every atom, summed over atom runs

    table[K, t] = Σ_{i<t} m_i·|K|/(|K| + dist(x_i, K))², so the Poisson integral of the
    weight restricted to any interval with atom run [lo, hi) is table[K, hi] − table[K, lo].
    """

    def __init__(self, weight: Weight, tree: DyadicTree):
        self.weight = weight
        self.tree = tree
        self.index = TreeIndex(weight, tree)
        kernel = poisson_matrix(weight.positions, tree.node_lefts, tree.node_lengths) * weight.masses[None, :]
        self.table = np.concatenate([np.zeros((tree.size, 1)), np.cumsum(kernel, axis=1)], axis=1)

    def restricted(self, nodes: np.ndarray, interval: DyadicInterval) -> np.ndarray:
        """P(weight·1_interval, K) for every heap id K in nodes"""
        s = self.index.atom_slice(interval)
        return self.table[nodes, s.stop] - self.table[nodes, s.start]

    def restricted_run(self, nodes: np.ndarray, lo: int, hi: int) -> np.ndarray:
        return self.table[nodes, hi] - self.table[nodes, lo]


def energy_weights(w: Weight, tree: DyadicTree) -> np.ndarray:
    """E(w, K)²·w(K) for every heap id"""
    index = TreeIndex(w, tree)
    return node_energy_squared(index) * index.node_masses()


def partition_best(term: np.ndarray, tree: DyadicTree, root: DyadicInterval) -> np.ndarray:
    """best(K) = max(term(K), best(K₋) + best(K₊)) for K under root, bottom-up"""
    best = np.zeros(tree.size)
    leaves = tree.subtree_ids(root, tree.depth)
    best[leaves] = term[leaves]
    for level in range(tree.depth - 1, root.level - 1, -1):
        ids = tree.subtree_ids(root, level)
        best[ids] = np.maximum(term[ids], best[2 * ids + 1] + best[2 * ids + 2])
    return best


def energy_constant(
    pair: WeightPair,
    tree: DyadicTree,
    prefix: Optional[PoissonPrefix] = None,
    weights: Optional[np.ndarray] = None,
) -> float:
    """√(max over dyadic I₀ with σ(I₀) > 0 of best(I₀)/σ(I₀))"""
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    prefix = prefix or PoissonPrefix(pair.sigma, tree)
    weights = energy_weights(pair.w, tree) if weights is None else weights
    sigma_masses = prefix.index.node_masses()

    ratio = 0.0
    for root in tree.intervals():
        sigma_root = sigma_masses[root.node_id]
        if sigma_root <= 0:
            continue
        ids = np.concatenate([tree.subtree_ids(root, level) for level in range(root.level, tree.depth + 1)])
        term = np.zeros(tree.size)
        term[ids] = prefix.restricted(ids, root) ** 2 * weights[ids]
        best = partition_best(term, tree, root)
        ratio = max(ratio, best[root.node_id] / sigma_root)
    logger.debug(f"Energy constant squared {ratio}")
    return math.sqrt(ratio)
