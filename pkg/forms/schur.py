"""
Schur-test sums and the Poisson decay estimate for nested intervals
"""

import logging
import math
from typing import Dict, Iterable, Optional

import numpy as np

from dyadic.goodness import is_good_pair
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from kernels.poisson import poisson
from models.data_models import DyadicInterval, GoodnessParams, SignedDensity, WeightPair
from models.errors import PreconditionError
from models.reports import DecayReport, SchurReport, safe_ratio

from .testing import a2_constant

logger = logging.getLogger(__name__)

DECAY_CONSTANT = 8.0


def schur_sum(
    pair: WeightPair,
    I: DyadicInterval,
    s: int,
    params: GoodnessParams,
    tree: DyadicTree,
    a2: Optional[float] = None,
) -> SchurReport:
    """Σ α(I, J) over J with 2^s|J| = |I| and 3I ∩ 3J = ∅, with both Cauchy–Schwarz factors

    α(I, J) = σ(I)^{1/2}w(J)^{1/2}|J|/(|J| + dist(I, J))²; the recorded constant is (Σα)²/A2².
    """
    if s < params.r:
        raise PreconditionError(f"Schur sums need s >= r = {params.r}, got {s}")
    tree.check(I)
    level = I.level + s
    if level > tree.depth:
        return SchurReport(I, s, 0, 0.0, 0.0, 0.0, a2 or 0.0, 0.0)

    length = math.ldexp(1.0, -level)
    k = np.arange(1 << level)
    start, end = I.index << s, (I.index + 1) << s
    # distances in units of |J|
    units = np.maximum(0, np.maximum(start - (k + 1), k - end))
    separated = units >= (1 << s) + 1
    if not np.any(separated):
        return SchurReport(I, s, 0, 0.0, 0.0, 0.0, a2 or 0.0, 0.0)

    sigma_mass = TreeIndex(pair.sigma, tree).mass(I)
    w_mass = TreeIndex(pair.w, tree).level_masses(level)[separated]
    kernel = length / (length + units[separated] * length) ** 2
    alpha = math.fsum(np.sqrt(sigma_mass * w_mass) * kernel)
    factor_a = math.fsum(kernel)
    factor_b = math.fsum(sigma_mass * w_mass * kernel)

    if a2 is None:
        a2 = a2_constant(pair, tree)
    constant = safe_ratio(alpha**2, a2**2)
    return SchurReport(I, s, int(np.count_nonzero(separated)), alpha, factor_a, factor_b, a2, constant)


def decay_bound(s: int, epsilon: float, constant: float = DECAY_CONSTANT) -> float:
    return constant * 2.0 ** (-s * (1.0 - 2.0 * epsilon))


def poisson_decay_check(
    pair: WeightPair,
    J: DyadicInterval,
    I: DyadicInterval,
    I_prime: DyadicInterval,
    params: GoodnessParams,
) -> DecayReport:
    """P(σ·1_{I′∖I}, J)/P(σ·1_{I′}, I) against 8·2^{-s(1−2ε)}"""
    if not (I_prime.contains(I) and I.contains(J)):
        raise PreconditionError(f"Need {J} ⊂ {I} ⊂ {I_prime}")
    s = J.level - I.level
    if s < params.r:
        raise PreconditionError(f"|J| must be at most 2^-{params.r}|I|, got s = {s}")
    if not is_good_pair(I, J, params):
        raise PreconditionError(f"{J} is too close to the boundary of {I}")

    sigma = pair.sigma
    outer = SignedDensity.of(sigma).restricted(I_prime)
    ring = outer.outside(I)
    numerator = poisson(ring, J)
    denominator = poisson(outer, I)
    ratio = 0.0 if numerator == 0 else safe_ratio(numerator, denominator)
    bound = decay_bound(s, params.epsilon)
    return DecayReport(J, I, I_prime, s, ratio, bound, ratio <= bound)


def decay_exponent(max_ratio_by_s: Dict[int, float]) -> Optional[float]:
    """Least-squares slope of −log2(max ratio) against s; None with fewer than two usable points"""
    points = [(s, math.log2(r)) for s, r in sorted(max_ratio_by_s.items()) if r > 0]
    if len(points) < 2:
        return None
    s, logs = np.array(points).T
    slope, _ = np.polyfit(s, logs, 1)
    return float(-slope)


def max_ratio_by_s(reports: Iterable[DecayReport]) -> Dict[int, float]:
    best: Dict[int, float] = {}
    for report in reports:
        best[report.s] = max(best.get(report.s, 0.0), report.ratio)
    return best
