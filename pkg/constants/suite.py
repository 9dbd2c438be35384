"""
All constants of a weight pair, the evidence ratios between them, and the doubling energy floor
"""

import copy
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from forms.norms import form_norm
from forms.split import FormContext
from forms.testing import a2_constant, testing_constants, weak_boundedness
from kernels.poisson import node_energy_squared
from models.data_models import GoodnessParams, Provenance, Weight, WeightPair
from models.reports import CONSTANT_NAMES, RATIO_NAMES, ConstantsReport

from .dini import DiniTables, dini_constant
from .energy import energy_constant
from .fluctuation import bounded_fluctuation_sup
from .functional import functional_energy_sup
from .profile import DiniProfile

logger = logging.getLogger(__name__)

FLOOR_TOL = 1e-12
ESTIMATED = ("F_func", "F_func_star", "BF", "BF_star")


@dataclass(frozen=True)
class EstimatorBudget:
    """Search sizes for the lower-bound estimators"""

    samples: int = 4
    iterations: int = 10
    a2_refine: int = 0


def doubling_energy_floor(sigma: Weight, tree: DyadicTree) -> float:
    """min of E(σ, I) over massive I at levels ≤ depth − 2, where every dyadic quarter of I is a tree interval"""
    if len(sigma) == 0:
        return 0.0
    index = TreeIndex(sigma, tree)
    energies = np.sqrt(np.maximum(node_energy_squared(index), 0.0))
    massive = (tree.node_levels <= max(tree.depth - 2, 0)) & (index.node_masses() > 0)
    return float(energies[massive].min(initial=math.inf)) if np.any(massive) else 0.0


def doubling_floor_holds(floor: float, c: float) -> bool:
    return floor >= c / 4.0 - FLOOR_TOL


def exact_constants(
    pair: WeightPair,
    tree: DyadicTree,
    params: GoodnessParams,
    profile: Optional[DiniProfile] = None,
    a2_refine: int = 0,
    context: Optional[FormContext] = None,
) -> ConstantsReport:
    """The constants that do not depend on a sampling seed"""
    profile = profile or DiniProfile(params.epsilon)
    report = ConstantsReport(params={**params.to_dict(), "depth": tree.depth, "profile": profile.to_dict()})
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        for name in CONSTANT_NAMES:
            report.set(name, 0.0, Provenance.EXACT)
        return report
    swapped = pair.swapped()
    ctx = (context or FormContext(pair, tree, r=params.r)).with_params(params)

    report.set("A2", a2_constant(pair, tree, a2_refine), Provenance.LOWER_BOUND)
    H, H_star = testing_constants(pair)
    report.set("H", H, Provenance.EXACT)
    report.set("H_star", H_star, Provenance.EXACT)
    report.set("W", weak_boundedness(pair, params, tree), Provenance.EXACT)
    report.set("E_energy", energy_constant(pair, tree), Provenance.DP_EXACT)
    report.set("E_energy_star", energy_constant(swapped, tree), Provenance.DP_EXACT)
    report.set("Psi", dini_constant(pair, tree, profile, params, DiniTables(pair, tree)), Provenance.DP_EXACT)
    report.set("Psi_star", dini_constant(swapped, tree, profile, params, DiniTables(swapped, tree)), Provenance.DP_EXACT)
    # goodness is not imposed on the norms: at desk depths it leaves nothing nested
    report.set("B_norm", form_norm(pair, "full", params, tree), Provenance.EXACT)
    report.set("B_sub_norm", form_norm(pair, ["sub"], params, tree, good=False, context=ctx), Provenance.EXACT)
    report.set("B_sup_norm", form_norm(pair, ["sup"], params, tree, good=False, context=ctx), Provenance.EXACT)
    return report


def estimate_constants(
    report: ConstantsReport,
    pair: WeightPair,
    tree: DyadicTree,
    params: GoodnessParams,
    seed: int,
    budget: EstimatorBudget = EstimatorBudget(),
    context: Optional[FormContext] = None,
) -> ConstantsReport:
    """A copy of report with the sampled lower bounds filled in for one seed"""
    out = copy.deepcopy(report)
    out.params["seed"] = seed
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return out
    swapped = pair.swapped()
    ctx = (context or FormContext(pair, tree, r=params.r)).with_params(params)
    out.set("F_func", functional_energy_sup(pair, tree, params, budget.samples, seed), Provenance.LOWER_BOUND)
    out.set("F_func_star", functional_energy_sup(swapped, tree, params, budget.samples, seed), Provenance.LOWER_BOUND)
    out.set(
        "BF", bounded_fluctuation_sup(pair, tree, params, budget.samples, budget.iterations, seed, ctx), Provenance.LOWER_BOUND
    )
    out.set(
        "BF_star",
        bounded_fluctuation_sup(swapped, tree, params, budget.samples, budget.iterations, seed),
        Provenance.LOWER_BOUND,
    )
    return out


def pair_constants(
    pair: WeightPair,
    tree: DyadicTree,
    params: GoodnessParams,
    seed: int = 0,
    profile: Optional[DiniProfile] = None,
    budget: EstimatorBudget = EstimatorBudget(),
    context: Optional[FormContext] = None,
) -> ConstantsReport:
    """Every named constant of one pair, with provenance"""
    ctx = context or FormContext(pair, tree, r=params.r)
    report = exact_constants(pair, tree, params, profile, budget.a2_refine, ctx)
    report = estimate_constants(report, pair, tree, params, seed, budget, ctx)
    logger.debug(f"Constants for seed {seed}: {report.values}")
    return report


def theorem_inequality_suite(
    pair: WeightPair,
    tree: DyadicTree,
    params: GoodnessParams,
    seeds: Iterable[int],
    profile: Optional[DiniProfile] = None,
    budget: EstimatorBudget = EstimatorBudget(),
) -> Tuple[ConstantsReport, pd.DataFrame]:
    """Constants under every sampling seed and one ratio row per seed

    The returned report keeps the largest estimate of each sampled constant. Ratios carry
    no pass/fail; the row table is evidence only.
    """
    ctx = FormContext(pair, tree, r=params.r)
    base = exact_constants(pair, tree, params, profile, budget.a2_refine, ctx)
    merged = copy.deepcopy(base)
    rows = []
    for seed in seeds:
        report = estimate_constants(base, pair, tree, params, seed, budget, ctx)
        rows.append({"seed": seed, "depth": tree.depth, **report.row()})
        for name in ESTIMATED:
            if name not in merged.values or report.get(name) > merged.get(name):
                merged.set(name, report.get(name), report.provenance.get(name, Provenance.LOWER_BOUND))
    table = pd.DataFrame(rows, columns=["seed", "depth", *CONSTANT_NAMES, *RATIO_NAMES])
    logger.info(f"Inequality suite: {len(rows)} rows at depth {tree.depth}")
    return merged, table
