"""
Brute-force references for the dynamic programs and combinatorial scans

Nothing here shares a recurrence with the code it checks: dyadic families are listed
explicitly as rows of a boolean matrix, Poisson integrals and energies are evaluated one
interval at a time, and maximal intervals are found by comparing every candidate against
every other. Exhaustive enumeration stops at subtrees of height 4 (458 330 families).
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from constants.profile import DiniProfile
from dyadic.goodness import is_good_pair
from dyadic.measure import mass
from dyadic.tree import DyadicTree
from kernels.poisson import energy, poisson
from models.data_models import (
    CoronaClass,
    DyadicInterval,
    GoodnessParams,
    SignedDensity,
    Weight,
    WeightedFunction,
    WeightPair,
)
from models.errors import DomainError
from models.forest import StoppingForest

logger = logging.getLogger(__name__)

MAX_EXHAUSTIVE_HEIGHT = 4
GRID_LIMIT = 512
ROW_CHUNK = 1 << 15


@lru_cache(maxsize=MAX_EXHAUSTIVE_HEIGHT + 1)
def family_masks(height: int) -> np.ndarray:
    """Every family of pairwise disjoint intervals of a dyadic subtree, one row each

    Columns follow heap order inside the subtree (level by level, left to right); the
    empty family is included.
    """
    if not 0 <= height <= MAX_EXHAUSTIVE_HEIGHT:
        raise DomainError(f"Exhaustive enumeration needs a subtree height in 0..{MAX_EXHAUSTIVE_HEIGHT}, got {height}")
    if height == 0:
        masks = np.array([[False], [True]])
        masks.setflags(write=False)
        return masks
    child = family_masks(height - 1)
    n = child.shape[0]
    left, right = np.repeat(child, n, axis=0), np.tile(child, (n, 1))
    masks = np.zeros((n * n + 1, (2 << height) - 1), dtype=bool)
    for level in range(height):
        child_block = slice((1 << level) - 1, (2 << level) - 1)
        start = (2 << level) - 1
        masks[: n * n, start : start + (1 << level)] = left[:, child_block]
        masks[: n * n, start + (1 << level) : start + (2 << level)] = right[:, child_block]
    masks[n * n, 0] = True
    masks.setflags(write=False)
    return masks


def subtree(tree: DyadicTree, root: DyadicInterval) -> List[DyadicInterval]:
    """Intervals under root in the column order of family_masks"""
    return [K for level in range(root.level, tree.depth + 1) for K in tree.level(level) if root.contains(K)]


def best_family(values: np.ndarray) -> float:
    """max over disjoint families of the summed values, values given in subtree heap order"""
    values = np.asarray(values, dtype=float)
    if not np.any(values):
        return 0.0
    height = int(round(math.log2(values.size + 1))) - 1
    masks = family_masks(height)
    best = 0.0
    for start in range(0, masks.shape[0], ROW_CHUNK):
        best = max(best, float(np.max(masks[start : start + ROW_CHUNK] @ values)))
    return best


def _require_shallow(tree: DyadicTree, root: Optional[DyadicInterval] = None) -> None:
    height = tree.depth - (root.level if root is not None else 0)
    if height > MAX_EXHAUSTIVE_HEIGHT:
        raise DomainError(f"Exhaustive search is limited to height {MAX_EXHAUSTIVE_HEIGHT}, got {height}")


def exhaustive_energy_constant(pair: WeightPair, tree: DyadicTree) -> float:
    """Energy constant by listing every disjoint family under every root"""
    _require_shallow(tree)
    sigma, w = pair.sigma, pair.w
    if len(sigma) == 0 or len(w) == 0:
        return 0.0
    ratio = 0.0
    for root in tree.intervals():
        sigma_root = mass(sigma, root)
        if sigma_root <= 0:
            continue
        inside = SignedDensity.of(sigma).restricted(root)
        values = [poisson(inside, K) ** 2 * energy(w, K) ** 2 * mass(w, K) for K in subtree(tree, root)]
        ratio = max(ratio, best_family(values) / sigma_root)
    return math.sqrt(ratio)


def _inner_scores(
    pair: WeightPair, root: DyadicInterval, inner: DyadicInterval, params: GoodnessParams, tree: DyadicTree
) -> Tuple[np.ndarray, np.ndarray]:
    """(score, gap) of every K under `inner`; score is 0 for K = inner and for K not good inside inner"""
    sigma, w = pair.sigma, pair.w
    whole = SignedDensity.of(sigma)
    outside_inner = whole.restricted(root).multiplier - whole.restricted(inner).multiplier
    density = SignedDensity(sigma, outside_inner)
    nodes = subtree(tree, inner)
    scores = np.zeros(len(nodes))
    gaps = np.array([K.level - inner.level for K in nodes])
    for position, K in enumerate(nodes):
        if K == inner or not is_good_pair(inner, K, params):
            continue
        scores[position] = poisson(density, K) ** 2 * energy(w, K) ** 2 * mass(w, K)
    return scores, gaps


def exhaustive_psi_table(
    pair: WeightPair,
    root: DyadicInterval,
    profile: DiniProfile,
    params: GoodnessParams,
    tree: DyadicTree,
    s_min: int,
) -> np.ndarray:
    """Ψ_w(I₀, S)² for every S under I₀ by enumerating (sub-partition, inner families, s)"""
    _require_shallow(tree, root)
    out = np.zeros(tree.size)
    s_max = tree.depth - root.level - 1
    if s_max < s_min or len(pair.sigma) == 0 or len(pair.w) == 0:
        return out

    nodes = subtree(tree, root)
    inner = {I_j: _inner_scores(pair, root, I_j, params, tree) for I_j in nodes}
    for s in range(s_min, s_max + 1):
        value = {}
        for I_j, (scores, gaps) in inner.items():
            value[I_j] = best_family(np.where(gaps >= s + 1, scores, 0.0))
        weight = profile.psi(s) ** -2
        for S in nodes:
            total = best_family([value[K] for K in subtree(tree, S)])
            out[S.node_id] = max(out[S.node_id], weight * total)
    return out


def exhaustive_dini_constant(pair: WeightPair, tree: DyadicTree, profile: DiniProfile, params: GoodnessParams) -> float:
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    best = 0.0
    for root in tree.intervals():
        sigma_root = mass(pair.sigma, root)
        if sigma_root <= 0 or root.level >= tree.depth - 1:
            continue
        best = max(best, exhaustive_psi_table(pair, root, profile, params, tree, 1)[root.node_id] / sigma_root)
    logger.debug(f"Exhaustive Dini constant squared {best}")
    return math.sqrt(best)


def maximal_scan(tree: DyadicTree, top: DyadicInterval, selects: Callable[[DyadicInterval], bool]) -> List[DyadicInterval]:
    """Selected strict subintervals of top with no selected strict ancestor below top"""
    selected = [K for K in tree.intervals() if top.strictly_contains(K) and selects(K)]
    maximal = [K for K in selected if not any(A.strictly_contains(K) for A in selected)]
    return sorted(maximal, key=lambda I: (I.level, I.index))


def _average(sigma: Weight, values: np.ndarray, interval: DyadicInterval) -> float:
    s = sigma.interval_slice(interval)
    return math.fsum(sigma.masses[s] * np.abs(values[s])) / math.fsum(sigma.masses[s])


def exhaustive_f_stopping_tree(
    sigma: Weight, f: WeightedFunction, I0: DyadicInterval, tree: DyadicTree, threshold: float
) -> StoppingForest:
    """f-stopping tree with averages summed per interval and a full maximal scan"""
    forest = StoppingForest(I0, kind="cz")
    forest.value[I0] = _average(sigma, f.values, I0)
    pending = [I0]
    while pending:
        F = pending.pop()
        bar = threshold * forest.value[F]

        def exceeds(K: DyadicInterval) -> bool:
            return mass(sigma, K) > 0 and _average(sigma, f.values, K) > bar

        for child in maximal_scan(tree, F, exceeds):
            forest.add(child, F, _average(sigma, f.values, child))
            pending.append(child)
    return forest


def exhaustive_dini_stopping_tree(
    pair: WeightPair,
    F: DyadicInterval,
    profile: DiniProfile,
    psi: float,
    params: GoodnessParams,
    tree: DyadicTree,
    threshold: float,
) -> StoppingForest:
    """Dini stopping tree from exhaustive Ψ tables and a full maximal scan"""
    bar = threshold * psi**2
    forest = StoppingForest(F, kind="dini")
    pending = [F]
    while pending:
        I0 = pending.pop()
        table = exhaustive_psi_table(pair, I0, profile, params, tree, params.r)
        if I0 == F:
            forest.value[F] = float(table[F.node_id])

        def violates(S: DyadicInterval) -> bool:
            sigma_s = mass(pair.sigma, S)
            return sigma_s > 0 and table[S.node_id] > bar * sigma_s

        for S in maximal_scan(tree, I0, violates):
            forest.add(S, I0, table[S.node_id])
            pending.append(S)
    return forest


def brute_force_parent(forest: StoppingForest, interval: DyadicInterval) -> Optional[DyadicInterval]:
    """The finest forest node containing the interval, or None outside the root"""
    holders = [node for node in forest.nodes() if node.contains(interval)]
    return max(holders, key=lambda node: node.level) if holders else None


def brute_force_corona_class(forest: StoppingForest, I: DyadicInterval, J: DyadicInterval) -> CoronaClass:
    child = J.ancestor(I.level + 1)
    if brute_force_parent(forest, child) == brute_force_parent(forest, J):
        return CoronaClass.C_O
    return CoronaClass.C_SUP


def exhaustive_weak_boundedness(pair: WeightPair, params: GoodnessParams, tree: DyadicTree) -> float:
    """max |⟨H_σ 1_I, 1_J⟩_w|/√(σ(I)w(J)) by a direct double sum for every comparable dyadic pair"""
    sigma, w = pair.sigma, pair.w
    if len(sigma) == 0 or len(w) == 0:
        return 0.0
    best = 0.0
    for I in tree.intervals():
        si = sigma.interval_slice(I)
        sigma_mass = math.fsum(sigma.masses[si])
        if sigma_mass <= 0:
            continue
        for J in tree.intervals():
            if abs(J.level - I.level) > params.r:
                continue
            sj = w.interval_slice(J)
            w_mass = math.fsum(w.masses[sj])
            if w_mass <= 0:
                continue
            kernel = 1.0 / (w.positions[sj, None] - sigma.positions[None, si])
            pairing = math.fsum((w.masses[sj, None] * kernel * sigma.masses[None, si]).ravel())
            best = max(best, abs(pairing) / math.sqrt(sigma_mass * w_mass))
    return best


def endpoint_grid(pair: WeightPair, limit: int = GRID_LIMIT) -> np.ndarray:
    """Uniform grid at half the smallest atom spacing, offset so no grid point is an atom"""
    points = np.unique(np.concatenate([pair.sigma.positions, pair.w.positions]))
    if points.size < 2:
        spacing = 1.0
    else:
        spacing = float(np.min(np.diff(points)))
    mesh = spacing / 2
    start = points[0] - mesh / 2 if points.size else 0.0
    count = int(math.ceil((points[-1] - start) / mesh)) + 2 if points.size else 2
    if count > limit:
        raise DomainError(f"Endpoint grid needs {count} points, above the limit {limit}")
    logger.debug(f"Endpoint grid of {count} points at mesh {mesh:.3e}")
    return start + mesh * np.arange(count)


def _grid_testing_squared(sigma: Weight, w: Weight, grid: np.ndarray) -> float:
    if len(sigma) == 0 or len(w) == 0:
        return 0.0
    kernel = 1.0 / (w.positions[:, None] - sigma.positions[None, :])
    sigma_at = np.searchsorted(sigma.positions, grid)
    w_at = np.searchsorted(w.positions, grid)
    seen: Dict[Tuple[int, int, int, int], float] = {}
    best = 0.0
    for a in range(grid.size):
        for b in range(a + 1, grid.size):
            run = (int(sigma_at[a]), int(sigma_at[b]), int(w_at[a]), int(w_at[b]))
            if run in seen:
                continue
            sa, sb, wa, wb = run
            sigma_mass = math.fsum(sigma.masses[sa:sb])
            if sigma_mass <= 0:
                seen[run] = 0.0
                continue
            transform = kernel[wa:wb, sa:sb] @ sigma.masses[sa:sb]
            seen[run] = math.fsum(w.masses[wa:wb] * transform**2) / sigma_mass
            best = max(best, seen[run])
    return best


def grid_testing_constants(pair: WeightPair, grid: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """(H, H*) as maxima over every interval between two points of a dense endpoint grid"""
    grid = endpoint_grid(pair) if grid is None else grid
    H = math.sqrt(_grid_testing_squared(pair.sigma, pair.w, grid))
    H_star = math.sqrt(_grid_testing_squared(pair.w, pair.sigma, grid))
    return H, H_star


def dense_a2(
    pair: WeightPair, centers: int = 1001, scales: int = 1000, octaves: Tuple[float, float] = (-12.0, 2.0)
) -> float:
    """max of P(w, I)·P(σ, I) over a centers × scales grid, centers on [0, 1], scales log-spaced"""
    sigma, w = pair.sigma, pair.w
    if len(sigma) == 0 or len(w) == 0:
        return 0.0
    mids = np.linspace(0.0, 1.0, centers)
    best = 0.0
    for length in np.logspace(octaves[0], octaves[1], scales, base=2.0):
        lefts = mids - length / 2
        product = np.ones(centers)
        for weight in (sigma, w):
            x = weight.positions[None, :]
            dist = np.maximum(0.0, np.maximum(lefts[:, None] - x, x - (lefts[:, None] + length)))
            product *= (weight.masses[None, :] * length / (length + dist) ** 2).sum(axis=1)
        best = max(best, float(product.max()))
    logger.debug(f"Dense A2 grid of {centers * scales} intervals: {best}")
    return best
