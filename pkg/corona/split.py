"""
Calderón–Zygmund corona regrouping of B_⋐ and the corona projections
"""

import logging
import math
from collections import defaultdict
from typing import Dict, Optional

import numpy as np

from dyadic.tree import DyadicTree
from forms.split import FormContext
from models.data_models import GoodnessParams, WeightedFunction, WeightPair
from models.errors import DomainError
from models.forest import StoppingForest
from models.reports import CoronaSplitReport, ProjectionReport

logger = logging.getLogger(__name__)


def cz_corona_split(
    pair: WeightPair,
    f: WeightedFunction,
    phi: WeightedFunction,
    forest: StoppingForest,
    params: GoodnessParams,
    tree: DyadicTree,
    context: Optional[FormContext] = None,
) -> CoronaSplitReport:
    """B₁ (argument (I_J∖F)σ), B₂ (argument Fσ) and B₃ (C_o pairs) for every stopping interval F

    Only pairs with J inside the forest root take part; B_sub is B_⋐ over the same pairs.
    """
    if f.weight != pair.sigma or phi.weight != pair.w:
        raise DomainError("f and φ must live on σ and w")
    ctx = (context or FormContext(pair, tree)).with_params(params)
    sigma_lo, sigma_hi = ctx.sigma_index.node_bounds()
    parents = forest.parent_ids(tree.size)

    totals: Dict[int, Dict[str, float]] = defaultdict(lambda: {"B1": 0.0, "B2": 0.0, "B3": 0.0})
    b_sub = []
    for term in ctx.nested_terms(f.values, phi.values, params.r):
        stop = parents[term.J.node_id]
        if stop < 0:
            continue
        whole = term.coefficient * term.pairing(term.lo, term.hi)
        b_sub.append(whole)
        row = totals[int(stop)]
        child_stop = parents[term.child.node_id]
        if child_stop == stop:
            row["B3"] += whole
            continue
        # I_J ⊋ F: split the σ run of I_J into F and the two runs around it
        a, b = int(sigma_lo[stop]), int(sigma_hi[stop])
        row["B2"] += term.coefficient * term.pairing(a, b)
        row["B1"] += term.coefficient * (term.pairing(term.lo, a) + term.pairing(b, term.hi))

    per_stop = []
    for F in forest.nodes():
        row = totals.get(F.node_id, {"B1": 0.0, "B2": 0.0, "B3": 0.0})
        per_stop.append({"stop": F.to_dict(), **row})
    report = CoronaSplitReport(
        per_stop=per_stop,
        B1=math.fsum(r["B1"] for r in per_stop),
        B2=math.fsum(r["B2"] for r in per_stop),
        B3=math.fsum(r["B3"] for r in per_stop),
        B_sub=math.fsum(b_sub),
    )
    logger.debug(f"CZ corona split over {len(forest)} stops, residual {report.residual:.3e}")
    return report


def _multiplicities(forest: StoppingForest, basis, parents: np.ndarray) -> np.ndarray:
    """Number of distinct forest parents among the two children of every Haar interval (0 outside the root)"""
    counts = np.zeros(len(basis), dtype=np.int64)
    for c, node in enumerate(basis.ids):
        if parents[node] < 0:
            continue
        left, right = parents[2 * node + 1], parents[2 * node + 2]
        counts[c] = len({int(left), int(right)})
    return counts


def corona_projections(
    pair: WeightPair,
    f: WeightedFunction,
    phi: WeightedFunction,
    forest: StoppingForest,
    tree: DyadicTree,
    context: Optional[FormContext] = None,
) -> ProjectionReport:
    """Bookkeeping of P^w_F (Haar J with π J = F) and P^σ_F (Haar I with a child of forest parent F)"""
    ctx = context or FormContext(pair, tree)
    parents = forest.parent_ids(tree.size)
    w_basis, sigma_basis = ctx.w_basis, ctx.sigma_basis

    d = w_basis.coefficient_vector(phi)
    w_owner = parents[w_basis.ids]
    stops = sorted({int(s) for s in w_owner if s >= 0})
    projections = []
    for stop in stops:
        columns = w_owner == stop
        projections.append(w_basis.matrix[:, columns] @ d[columns])
    w_energy = float(np.sum(d[w_owner >= 0] ** 2))

    orthogonality = 0.0
    for i in range(len(projections)):
        for j in range(i + 1, len(projections)):
            inner = WeightedFunction(pair.w, projections[i]).inner(WeightedFunction(pair.w, projections[j]))
            orthogonality = max(orthogonality, abs(inner))

    c = sigma_basis.coefficient_vector(f)
    sigma_mult = _multiplicities(forest, sigma_basis, parents)
    w_mult = (w_owner >= 0).astype(np.int64)

    return ProjectionReport(
        w_energy=w_energy,
        phi_norm_squared=phi.norm() ** 2,
        sigma_energy=float(np.sum(c**2 * sigma_mult)),
        f_norm_squared=f.norm() ** 2,
        max_w_multiplicity=int(w_mult.max(initial=0)),
        max_sigma_multiplicity=int(sigma_mult.max(initial=0)),
        w_orthogonality=orthogonality,
    )
