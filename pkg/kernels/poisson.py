"""
Poisson integrals and energies over dyadic intervals
"""

import math

import numpy as np

from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from models.data_models import DyadicInterval, SignedDensity, Weight


def poisson_kernel(positions: np.ndarray, left: float, length: float) -> np.ndarray:
    """|I|/(|I| + dist(x, I))² at each position, dist = 0 inside I"""
    x = np.asarray(positions, dtype=float)
    dist = np.maximum(0.0, np.maximum(left - x, x - (left + length)))
    return length / (length + dist) ** 2


def poisson(density: SignedDensity, interval: DyadicInterval) -> float:
    """P(ν, I) = Σ ν_i·|I|/(|I| + dist(x_i, I))²"""
    if len(density.weight) == 0:
        return 0.0
    kernel = poisson_kernel(density.weight.positions, float(interval.left), float(interval.length))
    return float(math.fsum(density.atom_masses * kernel))


def poisson_matrix(positions: np.ndarray, lefts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Kernel of every (interval, position) pair; rows are intervals"""
    x = np.asarray(positions, dtype=float)[None, :]
    left = np.asarray(lefts, dtype=float)[:, None]
    length = np.asarray(lengths, dtype=float)[:, None]
    dist = np.maximum(0.0, np.maximum(left - x, x - (left + length)))
    return length / (length + dist) ** 2


def energy_of_atoms(positions, masses, length: float) -> float:
    """E from the double sum w(I)^{-2} ΣΣ m_i m_j (x_i − x_j)²/|I|²"""
    x = np.asarray(positions, dtype=float)
    m = np.asarray(masses, dtype=float)
    total = m.sum()
    if total <= 0:
        return 0.0
    diff = x[:, None] - x[None, :]
    squared = float(np.sum(m[:, None] * m[None, :] * diff**2)) / (total**2 * length**2)
    return math.sqrt(max(squared, 0.0))


def energy(weight: Weight, interval: DyadicInterval) -> float:
    """E(w, I) ≥ 0; 0 when I carries no mass or a single atom"""
    s = weight.interval_slice(interval)
    masses = weight.masses[s]
    if masses.size < 2:
        return 0.0
    # local coordinates keep the variance free of cancellation at fine levels
    scale = 1 << interval.level
    local = np.array([float((p - interval.left) * scale) for p in weight.exact_positions[s]])
    mean = np.dot(masses, local) / masses.sum()
    variance = np.dot(masses, (local - mean) ** 2) / masses.sum()
    return math.sqrt(2.0 * variance)


def node_energy_squared(index: TreeIndex) -> np.ndarray:
    """E(w, I)² for every heap id, computed level by level in local coordinates"""
    tree: DyadicTree = index.tree
    weight = index.weight
    out = np.zeros(tree.size)
    if len(weight) == 0:
        return out
    masses = weight.masses
    x = weight.positions
    for level in range(tree.depth + 1):
        owner = index.leaf >> (tree.depth - level)
        local = x * (1 << level) - owner
        count = 1 << level
        atoms = np.bincount(owner, minlength=count)
        m0 = np.bincount(owner, weights=masses, minlength=count)
        m1 = np.bincount(owner, weights=masses * local, minlength=count)
        with np.errstate(divide="ignore", invalid="ignore"):
            mean = np.where(m0 > 0, m1 / m0, 0.0)
        centered = local - mean[owner]
        m2 = np.bincount(owner, weights=masses * centered**2, minlength=count)
        with np.errstate(divide="ignore", invalid="ignore"):
            # a single atom has no spread; rounding in the mean must not leave a residue
            out[(1 << level) - 1 : (1 << (level + 1)) - 1] = np.where((m0 > 0) & (atoms > 1), 2.0 * m2 / m0, 0.0)
    return out
