"""
Calderón–Zygmund stopping intervals of a function and the corona classification of nested pairs
"""

import logging
import math
from typing import Callable, List

import numpy as np

from dyadic.goodness import goodness_mask
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from forms.split import classify, node_means
from models.data_models import CoronaClass, DyadicInterval, GoodnessParams, PairClass, Weight, WeightedFunction
from models.errors import DomainError
from models.forest import StoppingForest

logger = logging.getLogger(__name__)

CZ_THRESHOLD = 4.0


def maximal_below(
    tree: DyadicTree, top: DyadicInterval, selects: Callable[[DyadicInterval], bool], descend=None
) -> List[DyadicInterval]:
    """Maximal strict subintervals of `top` passing `selects`, by a top-down scan

    `descend(K)` may cut the scan below K; by default every unselected K is opened.
    """
    found = []
    stack = list(reversed(top.children())) if top.level < tree.depth else []
    while stack:
        K = stack.pop()
        if selects(K):
            found.append(K)
        elif K.level < tree.depth and (descend is None or descend(K)):
            stack.extend(reversed(K.children()))
    return sorted(found, key=lambda I: (I.level, I.index))


def f_stopping_tree(
    sigma: Weight, f: WeightedFunction, I0: DyadicInterval, tree: DyadicTree, threshold: float = CZ_THRESHOLD
) -> StoppingForest:
    """Maximal F with E_F|f| > threshold·E_{F's parent}|f|, applied recursively from I0"""
    tree.check(I0)
    if f.weight != sigma:
        raise DomainError("f must be defined on the σ atoms")
    index = TreeIndex(sigma, tree)
    masses = index.node_masses()
    if masses[I0.node_id] <= 0:
        raise DomainError(f"σ({I0}) = 0; the stopping construction needs a massive root")
    averages = node_means(index, np.abs(f.values))

    forest = StoppingForest(I0, kind="cz")
    forest.value[I0] = float(averages[I0.node_id])
    pending = [I0]
    while pending:
        F = pending.pop()
        bar = threshold * averages[F.node_id]

        def exceeds(K: DyadicInterval) -> bool:
            return masses[K.node_id] > 0 and averages[K.node_id] > bar

        children = maximal_below(tree, F, exceeds)
        for child in children:
            forest.add(child, F, averages[child.node_id])
        if children:
            forest.packing[F] = math.fsum(masses[c.node_id] for c in children) / masses[F.node_id]
        pending.extend(children)

    logger.debug(f"f-stopping tree under {I0}: {len(forest)} intervals")
    return forest


def quasi_orthogonality(forest: StoppingForest, sigma: Weight, f: WeightedFunction, tree: DyadicTree) -> float:
    """Σ_F γ(F)²σ(F)/‖f‖²_σ; 0 for f = 0"""
    norm_squared = f.norm() ** 2
    if norm_squared == 0:
        return 0.0
    index = TreeIndex(sigma, tree)
    total = math.fsum(forest.value[F] ** 2 * index.mass(F) for F in forest.nodes())
    return total / norm_squared


def classify_pair(
    forest: StoppingForest, I: DyadicInterval, J: DyadicInterval, params: GoodnessParams
) -> CoronaClass:
    """C_o when the child of I holding J has the same forest parent as J, C_sup otherwise"""
    if not forest.root.contains(J):
        raise DomainError(f"{J} lies outside the forest root {forest.root}")
    if classify(I, J, params) != PairClass.P23:
        raise DomainError(f"({I}, {J}) is not a nested pair with |J| < 2^-{params.r}|I|")
    F = forest.parent_of(J)
    child = I.child_containing(J)
    if forest.root.contains(child) and forest.parent_of(child) == F:
        return CoronaClass.C_O
    return CoronaClass.C_SUP


def j_star_family(
    forest: StoppingForest, F: DyadicInterval, params: GoodnessParams, tree: DyadicTree
) -> List[DyadicInterval]:
    """Maximal good J* ⋐ F with forest parent F"""
    if F not in forest:
        raise DomainError(f"{F} is not a stopping interval of this forest")
    good = goodness_mask(tree, params)
    depth_floor = F.level + params.r + 1

    def selects(K: DyadicInterval) -> bool:
        return K.level >= depth_floor and bool(good[K.node_id]) and forest.parent_of(K) == F

    def descend(K: DyadicInterval) -> bool:
        return K not in forest

    family = maximal_below(tree, F, selects, descend)
    if not family:
        logger.debug(f"No good J* below {F} at depth {tree.depth}")
    return family
