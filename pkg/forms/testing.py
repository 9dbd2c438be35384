"""
Interval constants of a weight pair: A2, the testing constants H and H*, and weak boundedness W
"""

import logging
import math

import numpy as np

from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from kernels.hilbert import cross_kernel
from kernels.poisson import poisson_matrix
from models.data_models import GoodnessParams, WeightPair

logger = logging.getLogger(__name__)

CANDIDATE_CHUNK = 4096


def weak_boundedness(pair: WeightPair, params: GoodnessParams, tree: DyadicTree) -> float:
    """max |⟨H_σ 1_I, 1_J⟩_w|/√(σ(I)w(J)) over dyadic I, J of comparable length"""
    sigma, w = pair.sigma, pair.w
    if len(sigma) == 0 or len(w) == 0:
        return 0.0
    A = w.masses[:, None] * cross_kernel(w, sigma) * sigma.masses[None, :]
    S = np.zeros((A.shape[0] + 1, A.shape[1] + 1))
    S[1:, 1:] = A.cumsum(axis=0).cumsum(axis=1)
    s_index, w_index = TreeIndex(sigma, tree), TreeIndex(w, tree)

    best = 0.0
    for i_level in range(tree.depth + 1):
        bi = s_index.bounds(i_level)
        ilo, ihi = bi[:-1], bi[1:]
        sigma_mass = s_index.level_masses(i_level)
        for j_level in range(max(0, i_level - params.r), min(tree.depth, i_level + params.r) + 1):
            bj = w_index.bounds(j_level)
            jlo, jhi = bj[:-1], bj[1:]
            w_mass = w_index.level_masses(j_level)
            values = (
                S[jhi[:, None], ihi[None, :]]
                - S[jlo[:, None], ihi[None, :]]
                - S[jhi[:, None], ilo[None, :]]
                + S[jlo[:, None], ilo[None, :]]
            )
            denominator = np.sqrt(w_mass[:, None] * sigma_mass[None, :])
            valid = denominator > 0
            if np.any(valid):
                best = max(best, float(np.max(np.abs(values[valid]) / denominator[valid])))
    return best


def _testing_squared(pair: WeightPair) -> float:
    """max over atom runs of σ(I)^{-1} Σ_{y_j ∈ I} w_j |H(σ1_I)(y_j)|²"""
    sigma, w = pair.sigma, pair.w
    if len(sigma) == 0 or len(w) == 0:
        return 0.0
    G = cross_kernel(w, sigma)
    weighted = G * sigma.masses[None, :]
    merged = sorted(
        [(p, 0, i) for i, p in enumerate(sigma.exact_positions)] + [(p, 1, j) for j, p in enumerate(w.exact_positions)]
    )
    is_sigma = np.array([kind == 0 for _, kind, _ in merged])
    sigma_before = np.concatenate([[0], np.cumsum(is_sigma)])
    w_before = np.concatenate([[0], np.cumsum(~is_sigma)])
    sigma_cum = np.concatenate([[0.0], np.cumsum(sigma.masses)])

    best = 0.0
    total = len(merged)
    for start in range(total):
        s0, w0 = sigma_before[start], w_before[start]
        if s0 == len(sigma):
            break
        # H(σ1_I) at every w atom, for I covering σ atoms s0..s0+k
        partial = np.cumsum(weighted[:, s0:], axis=1)
        squared = w.masses[w0:, None] * partial[w0:, :] ** 2
        running = np.concatenate([np.zeros((1, squared.shape[1])), np.cumsum(squared, axis=0)], axis=0)
        ends = np.arange(start + 1, total + 1)
        n_sigma = sigma_before[ends] - s0
        n_w = w_before[ends] - w0
        has_sigma = n_sigma > 0
        if not np.any(has_sigma):
            continue
        cols = n_sigma[has_sigma] - 1
        values = running[n_w[has_sigma], cols]
        masses = sigma_cum[s0 + n_sigma[has_sigma]] - sigma_cum[s0]
        best = max(best, float(np.max(values / masses)))
    return best


def testing_constants(pair: WeightPair):
    """(H, H*): exact suprema over all intervals, attained on runs of the merged atom list"""
    H = math.sqrt(_testing_squared(pair))
    H_star = math.sqrt(_testing_squared(pair.swapped()))
    return H, H_star


def _candidate_max(pair: WeightPair, lefts: np.ndarray, lengths: np.ndarray) -> float:
    best = 0.0
    keep = lengths > 0
    lefts, lengths = lefts[keep], lengths[keep]
    for start in range(0, lefts.shape[0], CANDIDATE_CHUNK):
        chunk = slice(start, start + CANDIDATE_CHUNK)
        p_sigma = poisson_matrix(pair.sigma.positions, lefts[chunk], lengths[chunk]) @ pair.sigma.masses
        p_w = poisson_matrix(pair.w.positions, lefts[chunk], lengths[chunk]) @ pair.w.masses
        if p_sigma.size:
            best = max(best, float(np.max(p_sigma * p_w)))
    return best


def a2_candidates(pair: WeightPair, tree: DyadicTree, refine: int = 0):
    """(lefts, lengths) of every candidate interval"""
    lefts = [tree.node_lefts]
    lengths = [tree.node_lengths]

    points = np.sort(np.concatenate([pair.sigma.positions, pair.w.positions]))
    if points.size:
        # intervals spanned by two atoms
        a, b = np.triu_indices(points.size, k=1)
        lefts.append(points[a])
        lengths.append(points[b] - points[a])
        # centers at atoms and midpoints, scales at atom distances and dyadic lengths
        centers = np.concatenate([points, (points[1:] + points[:-1]) / 2])
        dyadic = np.ldexp(1.0, -np.arange(tree.depth + 1))
        for center in centers:
            scales = np.concatenate([np.abs(points - center), dyadic])
            scales = scales[scales > 0]
            lefts.append(center - scales / 2)
            lengths.append(scales)

    if refine > 0:
        grid = np.arange(1 << refine) / (1 << refine)
        exponents = np.arange(0, (tree.depth + 2) * (1 << refine) + 1) / (1 << refine)
        scales = np.power(2.0, -exponents)
        c, t = np.meshgrid(grid, scales, indexing="ij")
        lefts.append((c - t / 2).reshape(-1))
        lengths.append(t.reshape(-1))
    return np.concatenate(lefts), np.concatenate(lengths)


def a2_constant(pair: WeightPair, tree: DyadicTree, refine: int = 0) -> float:
    """max of P(w, I)·P(σ, I) over the candidate intervals; a lower bound for A2

    refine=k adds centers on the 2^{-k} grid and scales 2^{-m/2^k}; the candidate sets
    nest as k grows, so the value never decreases with k.
    """
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    lefts, lengths = a2_candidates(pair, tree, refine)
    value = _candidate_max(pair, lefts, lengths)
    logger.debug(f"A2 lower bound {value} from {lefts.shape[0]} candidates")
    return value


def a2_at(pair: WeightPair, left: float, length: float) -> float:
    """P(w, I)·P(σ, I) for a single interval"""
    return _candidate_max(pair, np.array([left]), np.array([length]))
