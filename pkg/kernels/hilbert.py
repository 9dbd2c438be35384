"""
Discrete Hilbert transform of atomic densities

Hν(y) = Σ_i m_i·multiplier_i/(y − x_i), summed exactly over the atoms.
"""

import logging
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from models.data_models import SignedDensity, Weight, WeightedFunction, format_position
from models.errors import SingularityError

logger = logging.getLogger(__name__)

# +1 is the lab's convention; the fault-injection hook flips it
KERNEL_SIGN = 1.0


@contextmanager
def flipped_kernel_sign() -> Iterator[None]:
    """Temporarily negate the Hilbert kernel (fault injection)"""
    global KERNEL_SIGN
    previous = KERNEL_SIGN
    KERNEL_SIGN = -previous
    logger.warning("Hilbert kernel sign flipped for fault injection")
    try:
        yield
    finally:
        KERNEL_SIGN = previous


def set_kernel_sign(sign: float) -> None:
    global KERNEL_SIGN
    KERNEL_SIGN = 1.0 if sign >= 0 else -1.0


def check_disjoint(targets: Sequence, sources: Sequence) -> None:
    """SingularityError when an evaluation point carries a source atom"""
    shared = set(targets) & set(sources)
    if shared:
        first = min(shared)
        shown = format_position(first) if isinstance(first, Fraction) else str(first)
        raise SingularityError(f"Hilbert kernel evaluated at atom position {shown}")


def hilbert_matrix(
    targets: Sequence, sources: Sequence, delta: float = 0.0, exact_check: bool = True
) -> np.ndarray:
    """G[j, i] = sign/(y_j − x_i), zeroed where |y_j − x_i| < delta"""
    if exact_check:
        check_disjoint(targets, sources)
    y = np.asarray([float(t) for t in targets], dtype=float)[:, None]
    x = np.asarray([float(s) for s in sources], dtype=float)[None, :]
    diff = y - x
    if np.any(diff == 0):
        raise SingularityError("Hilbert kernel evaluated at an atom position")
    kernel = KERNEL_SIGN / diff
    if delta > 0:
        kernel = np.where(np.abs(diff) < delta, 0.0, kernel)
    return kernel


def hilbert_apply(density: SignedDensity, points: Sequence, delta: float = 0.0) -> np.ndarray:
    """Hν at every evaluation point"""
    if len(points) == 0:
        return np.zeros(0)
    if len(density.weight) == 0:
        return np.zeros(len(points))
    exact = all(isinstance(p, (Fraction, int)) for p in points)
    sources = density.weight.exact_positions if exact else density.weight.positions
    if not exact:
        check_disjoint([float(p) for p in points], list(sources))
    G = hilbert_matrix(points, sources, delta, exact_check=exact)
    return G @ density.atom_masses


def pairing(density: SignedDensity, w: Weight, g: WeightedFunction, delta: float = 0.0) -> float:
    """⟨Hν, g⟩_w = Σ_j w_j g_j Hν(y_j)"""
    if len(w) == 0 or len(density.weight) == 0:
        return 0.0
    values = hilbert_apply(density, w.exact_positions, delta)
    return float(np.dot(w.masses * g.values, values))


def cross_kernel(targets: Weight, sources: Weight, delta: float = 0.0) -> np.ndarray:
    """hilbert_matrix between two weights' atoms"""
    return hilbert_matrix(targets.exact_positions, sources.exact_positions, delta)
