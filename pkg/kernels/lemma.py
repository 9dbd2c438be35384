"""
Monotonicity of Haar pairings against dominated densities, and its Taylor refinement
"""

import logging
import math
from typing import Optional

import numpy as np

from dyadic.goodness import is_good_pair
from haar.basis import haar_function
from models.data_models import DyadicInterval, GoodnessParams, SignedDensity, Weight
from models.errors import PreconditionError
from models.reports import MonotonicityReport, TaylorReport

from .hilbert import pairing
from .poisson import poisson

logger = logging.getLogger(__name__)

MONOTONICITY_TOL = 1e-12
TAYLOR_CONSTANT = 16.0


def _require_outside(density: SignedDensity, interval: DyadicInterval, name: str) -> None:
    s = density.weight.interval_slice(interval)
    if np.any(density.multiplier[s] != 0):
        raise PreconditionError(f"{name} charges atoms inside {interval}")


def monotonicity_check(
    nu: SignedDensity,
    mu: SignedDensity,
    J: DyadicInterval,
    w: Weight,
    outside: Optional[DyadicInterval] = None,
) -> MonotonicityReport:
    """|⟨Hν, h^w_J⟩_w| ≤ ⟨Hμ, h^w_J⟩_w for |ν| ≤ μ, both vanishing on an interval I ⊇ J"""
    outside = outside or J
    if not outside.contains(J):
        raise PreconditionError(f"{J} is not inside {outside}")
    if nu.weight != mu.weight:
        raise PreconditionError("ν and μ must live on the same atoms")
    if np.any(np.abs(nu.atom_masses) > mu.atom_masses * (1 + 1e-15)):
        raise PreconditionError("|ν| ≤ μ fails at some atom")
    _require_outside(nu, outside, "ν")
    _require_outside(mu, outside, "μ")

    h = haar_function(w, J)
    signed = abs(pairing(nu, w, h))
    dominating = pairing(mu, w, h)
    tolerance = MONOTONICITY_TOL * max(1.0, abs(dominating))
    holds = dominating >= -tolerance and signed <= dominating + tolerance
    if not holds:
        logger.debug(f"Monotonicity fails on {J}: {signed} > {dominating}")
    return MonotonicityReport(J, signed, dominating, tolerance, holds)


def taylor_refinement(
    mu: SignedDensity,
    J: DyadicInterval,
    J_star: DyadicInterval,
    I: DyadicInterval,
    w: Weight,
    params: GoodnessParams,
    constant: float = TAYLOR_CONSTANT,
) -> TaylorReport:
    """P(μ, J*)·|⟨x/|J*|, h_J⟩_w| against ⟨Hμ, h_J⟩_w + C·(|J|/|I|)^{1−ε}P(μ, J)√w(J)"""
    if not (J_star.contains(J) and I.strictly_contains(J_star)):
        raise PreconditionError(f"Need {J} ⊂ {J_star} ⊊ {I}")
    if J_star.level - I.level < params.r:
        raise PreconditionError(f"{J_star} is not {params.r} levels below {I}")
    if not is_good_pair(I, J, params):
        raise PreconditionError(f"{J} is not good inside {I}")
    if np.any(mu.multiplier < 0):
        raise PreconditionError("μ must be nonnegative")
    _require_outside(mu, I, "μ")

    h = haar_function(w, J)
    s = w.interval_slice(J)
    moment = float(np.dot(w.masses[s] * h.values[s], w.positions[s] - float(J.center)))
    lhs = poisson(mu, J_star) * abs(moment) / float(J_star.length)
    pair_value = pairing(mu, w, h)
    w_mass = math.fsum(w.masses[s])
    gap_factor = (float(J.length) / float(I.length)) ** (1.0 - params.epsilon)
    error_term = gap_factor * poisson(mu, J) * math.sqrt(w_mass)
    denominator = pair_value + constant * error_term
    if lhs == 0.0:
        ratio = 0.0
    elif denominator > 0:
        ratio = lhs / denominator
    else:
        ratio = math.inf
    return TaylorReport(J, lhs, pair_value, error_term, constant, ratio)
