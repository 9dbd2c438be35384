"""
Dini stopping intervals and the regrouping of the stop form along them
"""

import logging
import math
from collections import defaultdict
from typing import Dict, List, Optional

import numpy as np

from constants.dini import DiniTables, psi_table
from constants.profile import DiniProfile
from dyadic.tree import DyadicTree
from forms.split import FormContext
from models.data_models import DyadicInterval, GoodnessParams, WeightedFunction, WeightPair
from models.errors import ConfigurationError, DomainError
from models.forest import StoppingForest
from models.reports import StopFormReport

from .bf import stop_form_terms
from .stopping import maximal_below

logger = logging.getLogger(__name__)

DINI_THRESHOLD = 4.0
PACKING_BOUND = 0.25
PACKING_TOL = 1e-12


def dini_stopping_tree(
    pair: WeightPair,
    F: DyadicInterval,
    profile: DiniProfile,
    psi: float,
    params: GoodnessParams,
    tree: DyadicTree,
    threshold: float = DINI_THRESHOLD,
    tables: Optional[DiniTables] = None,
) -> StoppingForest:
    """Maximal σ-massive S ⊊ I₀ with Ψ_w(I₀, S)² > threshold·Ψ²·σ(S), applied recursively from F

    Each generation's packing Σσ(S)/σ(I₀) is recorded on the forest.
    """
    if not psi > 0:
        raise ConfigurationError(f"The Dini stopping tree needs a positive Dini constant, got {psi}")
    tree.check(F)
    tables = tables or DiniTables(pair, tree)
    masses = tables.sigma_masses
    bar = threshold * psi**2

    forest = StoppingForest(F, kind="dini")
    forest.value[F] = float(psi_table(pair, F, profile, params, tree, params.r, tables)[F.node_id])
    pending = [F]
    while pending:
        I0 = pending.pop()
        table = psi_table(pair, I0, profile, params, tree, params.r, tables)

        def violates(S: DyadicInterval) -> bool:
            return masses[S.node_id] > 0 and table[S.node_id] > bar * masses[S.node_id]

        stops = maximal_below(tree, I0, violates)
        for S in stops:
            forest.add(S, I0, table[S.node_id])
        if stops:
            packing = math.fsum(masses[S.node_id] for S in stops) / masses[I0.node_id]
            forest.packing[I0] = packing
            if packing > PACKING_BOUND + PACKING_TOL:
                logger.warning(f"Dini packing {packing:.6f} above 1/4 under {I0}")
        pending.extend(stops)

    logger.debug(f"Dini stopping tree under {F}: {len(forest)} intervals, max packing {forest.max_packing():.4f}")
    return forest


def nontrivial_dini_tree(
    pair: WeightPair,
    F: DyadicInterval,
    profile: DiniProfile,
    psi: float,
    params: GoodnessParams,
    tree: DyadicTree,
    threshold: float = DINI_THRESHOLD,
    tables: Optional[DiniTables] = None,
) -> StoppingForest:
    """The Dini stopping tree at `threshold`; when that is {F}, the tree at half the largest
    ratio Ψ_w(F, S)²/(Ψ²σ(S)) over S ⊊ F, so at least one interval stops

    Stays {F} only when Ψ_w(F, ·) vanishes below F.
    """
    tables = tables or DiniTables(pair, tree)
    forest = dini_stopping_tree(pair, F, profile, psi, params, tree, threshold, tables)
    if len(forest) >= 2:
        return forest
    table = psi_table(pair, F, profile, params, tree, params.r, tables)
    masses = tables.sigma_masses
    ids = np.concatenate([tree.subtree_ids(F, level) for level in range(F.level, tree.depth + 1)])[1:]
    ids = ids[masses[ids] > 0]
    ratios = table[ids] / (psi**2 * masses[ids])
    top = float(np.max(ratios, initial=0.0))
    if top <= 0:
        return forest
    logger.debug(f"Dini tree under {F} trivial at threshold {threshold}; rebuilding at {top / 2:.6g}")
    return dini_stopping_tree(pair, F, profile, psi, params, tree, top / 2, tables)


def packing_holds(forest: StoppingForest) -> bool:
    return forest.max_packing() <= PACKING_BOUND + PACKING_TOL


def stop_form_split(
    pair: WeightPair,
    f: WeightedFunction,
    phi: WeightedFunction,
    F: DyadicInterval,
    dini_forest: StoppingForest,
    params: GoodnessParams,
    tree: DyadicTree,
    stopping: Optional[StoppingForest] = None,
    context: Optional[FormContext] = None,
) -> StopFormReport:
    """B₁ (argument S), B₂ (argument I_J∖S) and B₃ (argument S∖I_J) for every Dini stop S

    B_stop = Σ_S B₁ + B₂ − B₃. Also the sup of b_J = Σ_I E_{I_J}Δ_I f·1_{I_J} over every J.
    """
    if dini_forest.root != F:
        raise DomainError(f"The Dini forest is rooted at {dini_forest.root}, not {F}")
    ctx = (context or FormContext(pair, tree)).with_params(params)
    sigma_lo, sigma_hi = ctx.sigma_index.node_bounds()
    parents = dini_forest.parent_ids(tree.size)

    totals: Dict[int, Dict[str, float]] = defaultdict(lambda: {"B1": 0.0, "B2": 0.0, "B3": 0.0})
    coefficients: Dict[DyadicInterval, List[float]] = defaultdict(list)
    b_stop = []
    for term in stop_form_terms(ctx, F, f.values, phi.values, params.r, stopping):
        coefficients[term.J].append(term.coefficient)
        b_stop.append(term.coefficient * term.pairing(term.lo, term.hi))
        stop = int(parents[term.J.node_id])
        S = DyadicInterval.from_node_id(stop)
        sa, sb = int(sigma_lo[stop]), int(sigma_hi[stop])
        row = totals[stop]
        row["B1"] += term.coefficient * term.pairing(sa, sb)
        if S.strictly_contains(term.child):
            row["B3"] += term.coefficient * (term.pairing(sa, term.lo) + term.pairing(term.hi, sb))
        else:
            row["B2"] += term.coefficient * (term.pairing(term.lo, sa) + term.pairing(sb, term.hi))

    # terms arrive finest I first; b_J on the ring of the k-th coarsest I_J is the k-th partial sum
    max_b = 0.0
    for values in coefficients.values():
        partial = np.cumsum(values[::-1])
        max_b = max(max_b, float(np.max(np.abs(partial))))

    per_stop = []
    for S in dini_forest.nodes():
        row = totals.get(S.node_id, {"B1": 0.0, "B2": 0.0, "B3": 0.0})
        per_stop.append({"stop": S.to_dict(), **row})
    report = StopFormReport(
        root=F,
        per_stop=per_stop,
        B1=math.fsum(r["B1"] for r in per_stop),
        B2=math.fsum(r["B2"] for r in per_stop),
        B3=math.fsum(r["B3"] for r in per_stop),
        B_stop=math.fsum(b_stop),
        max_b=max_b,
        pairs=len(b_stop),
    )
    logger.debug(f"Stop form split under {F}: residual {report.residual:.3e}, sup b_J {max_b:.4f}")
    return report
