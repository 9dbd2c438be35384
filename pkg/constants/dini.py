"""
Dini functional and Dini energy constant by nested dynamic programming

For a root I₀, a sub-partition {I_j} of S and a scale gap s, each I_j contributes the
best disjoint family of pair-good descendants K with |K| ≤ 2^{-(s+1)}|I_j|, scored by
P(σ·(1_{I₀} − 1_{I_j}), K)²·E(w, K)²·w(K). One s serves the whole sub-partition: the
outer DP runs once per s and the best ψ(s)^{-2}·total is kept. The inner DP runs once
per (I₀, I_j) and records the best total at every gap, so all s are read off one pass.
"""

import logging
import math
from typing import Optional

import numpy as np

from dyadic.goodness import pair_goodness_offsets
from dyadic.tree import DyadicTree
from models.data_models import DyadicInterval, GoodnessParams, WeightPair
from models.errors import DomainError

from .energy import PoissonPrefix, energy_weights
from .profile import DiniProfile

logger = logging.getLogger(__name__)


class DiniTables:
    """Poisson prefix of σ and energy weights of w, shared by every root of one pair"""

    def __init__(self, pair: WeightPair, tree: DyadicTree):
        self.pair = pair
        self.tree = tree
        self.prefix = PoissonPrefix(pair.sigma, tree)
        self.weights = energy_weights(pair.w, tree)
        self.sigma_masses = self.prefix.index.node_masses()


def _inner_totals(
    tables: DiniTables, root: DyadicInterval, inner: DyadicInterval, params: GoodnessParams, max_gap: int
) -> np.ndarray:
    """totals[g] = best disjoint admissible family inside `inner` using gaps ≥ g, for g = 1..max_gap"""
    tree = tables.tree
    totals = np.zeros(max_gap + 1)
    best = None
    for level in range(tree.depth, inner.level, -1):
        gap = level - inner.level
        ids = tree.subtree_ids(inner, level)
        outside_inner = tables.prefix.restricted(ids, root) - tables.prefix.restricted(ids, inner)
        term = outside_inner**2 * tables.weights[ids] * pair_goodness_offsets(gap, params)
        if best is not None:
            term = np.maximum(term, best.reshape(-1, 2).sum(axis=1))
        best = term
        if gap <= max_gap:
            totals[gap] = best.sum()
    return totals


def psi_table(
    pair: WeightPair,
    root: DyadicInterval,
    profile: DiniProfile,
    params: GoodnessParams,
    tree: DyadicTree,
    s_min: int,
    tables: Optional[DiniTables] = None,
) -> np.ndarray:
    """Ψ_w(I₀, S)² for every S under I₀ (indexed by heap id, zero elsewhere)"""
    tree.check(root)
    tables = tables or DiniTables(pair, tree)
    out = np.zeros(tree.size)
    s_max = tree.depth - root.level - 1
    if s_max < s_min or len(pair.sigma) == 0 or len(pair.w) == 0:
        return out

    # inner totals at every gap, one row per I_j that can host a gap of s_min + 1
    inner = {}
    for level in range(root.level, tree.depth - s_min):
        ids = tree.subtree_ids(root, level)
        inner[level] = np.array(
            [
                _inner_totals(tables, root, DyadicInterval.from_node_id(int(n)), params, tree.depth - level)
                for n in ids
            ]
        )

    for s in range(s_min, s_max + 1):
        gap = s + 1
        value = np.zeros(tree.size)
        outer = None
        for level in range(tree.depth, root.level - 1, -1):
            ids = tree.subtree_ids(root, level)
            totals = inner.get(level)
            own = totals[:, gap] if totals is not None and gap < totals.shape[1] else np.zeros(len(ids))
            if outer is not None:
                own = np.maximum(own, outer.reshape(-1, 2).sum(axis=1))
            outer = own
            value[ids] = outer
        np.maximum(out, value * profile.psi(s) ** -2, out=out)
    return out


def dini_functional(
    pair: WeightPair,
    I0: DyadicInterval,
    S: DyadicInterval,
    profile: DiniProfile,
    params: GoodnessParams,
    tree: DyadicTree,
    tables: Optional[DiniTables] = None,
) -> float:
    """Ψ_w(I₀, S)² with scale gaps s ≥ r"""
    if not I0.contains(S):
        raise DomainError(f"{S} is not inside {I0}")
    return float(psi_table(pair, I0, profile, params, tree, params.r, tables)[S.node_id])


def dini_constant(
    pair: WeightPair,
    tree: DyadicTree,
    profile: DiniProfile,
    params: GoodnessParams,
    tables: Optional[DiniTables] = None,
) -> float:
    """𝚿 = √(max over I₀ with σ(I₀) > 0 of Ψ_w(I₀, I₀)²/σ(I₀)), scale gaps s ≥ 1"""
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    tables = tables or DiniTables(pair, tree)
    best = 0.0
    for root in tree.intervals():
        sigma_root = tables.sigma_masses[root.node_id]
        if sigma_root <= 0 or root.level >= tree.depth - 1:
            continue
        value = psi_table(pair, root, profile, params, tree, 1, tables)[root.node_id]
        best = max(best, value / sigma_root)
    logger.debug(f"Dini constant squared {best}")
    return math.sqrt(best)
