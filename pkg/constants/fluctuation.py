"""
Bounded-fluctuation lower bounds by alternating maximization

For fixed f the best adapted g is the normalized image of f under the reduced stop-form
matrix; for fixed g the stop form is linear in f and is maximized over the bounded-fluctuation
polytope {E_I|f| ≤ 1} with scipy's linear programming. The objective of each candidate is
|B_stop(f, g)|/((σ(F)^{1/2} + ‖f‖_σ)·‖g‖_w), and the best value seen is returned.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from corona.bf import BF_FAMILIES, bf_function, stop_form_matrix
from corona.stopping import f_stopping_tree, j_star_family
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from forms.split import FormContext
from models.data_models import DyadicInterval, GoodnessParams, WeightedFunction, WeightPair
from models.forest import StoppingForest

from .functional import DEFAULT_SAMPLES, adapted_basis, sampled_functions

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 20
STARTS_PER_FAMILY = 2


class FluctuationProblem:
    """The stop form of one stopping interval, reduced to f-coordinates and adapted-g coordinates"""

    def __init__(self, ctx: FormContext, F: DyadicInterval, forest: StoppingForest, params: GoodnessParams):
        tree = ctx.tree
        sigma = ctx.pair.sigma
        self.F = F
        self.sigma = sigma
        self.sigma_F = TreeIndex(sigma, tree).mass(F)
        children = forest.children(F)
        stars = j_star_family(forest, F, params, tree)
        self.g_basis = adapted_basis(ctx.pair.w, tree, F, children, stars)
        # f-coordinates: one per stopping child, one per remaining σ atom of F
        index = TreeIndex(sigma, tree)
        columns, free = [], np.zeros(len(sigma), dtype=bool)
        free[index.atom_slice(F)] = True
        for child in children:
            run = index.atom_slice(child)
            if run.stop > run.start:
                column = np.zeros(len(sigma))
                column[run] = 1.0
                columns.append(column)
            free[run] = False
        for atom in np.nonzero(free)[0]:
            column = np.zeros(len(sigma))
            column[atom] = 1.0
            columns.append(column)
        self.f_basis = np.column_stack(columns) if columns else np.zeros((len(sigma), 0))

        M = stop_form_matrix(ctx, F, params.r, forest)
        self.reduced = self.g_basis.T @ M

        parents = forest.parent_ids(tree.size)
        lo, hi = index.node_bounds()
        masses = index.node_masses()
        rows, bounds = [], []
        for node in np.nonzero((parents == F.node_id) & (masses > 0))[0]:
            indicator = np.zeros(len(sigma))
            indicator[lo[node] : hi[node]] = sigma.masses[lo[node] : hi[node]]
            rows.append(indicator @ self.f_basis)
            bounds.append(masses[node])
        self.constraints = np.array(rows) if rows else np.zeros((0, self.f_basis.shape[1]))
        self.bounds = np.array(bounds)

    @property
    def trivial(self) -> bool:
        return self.sigma_F <= 0 or self.g_basis.shape[1] == 0 or self.f_basis.shape[1] == 0

    def ratio(self, f_values: np.ndarray) -> float:
        value = float(np.linalg.norm(self.reduced @ f_values))
        scale = math.sqrt(self.sigma_F) + WeightedFunction(self.sigma, f_values).norm()
        return value / scale if scale > 0 else 0.0

    def best_f(self, direction: np.ndarray) -> Optional[np.ndarray]:
        """argmax of direction·f over the polytope, as σ-atom values"""
        c = direction @ self.f_basis
        k = c.shape[0]
        result = linprog(
            np.concatenate([-c, c]),
            A_ub=np.hstack([self.constraints, self.constraints]),
            b_ub=self.bounds,
            bounds=[(0, None)] * (2 * k),
            method="highs",
        )
        if not result.success:
            logger.debug(f"Bounded-fluctuation LP under {self.F} stopped: {result.message}")
            return None
        x = result.x[:k] - result.x[k:]
        return self.f_basis @ x


def bounded_fluctuation_constant(
    pair: WeightPair,
    F: DyadicInterval,
    forest: StoppingForest,
    params: GoodnessParams,
    tree: DyadicTree,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    context: Optional[FormContext] = None,
) -> float:
    """Best |B_stop(f, g)|/((σ(F)^{1/2} + ‖f‖_σ)‖g‖_w) found; a lower bound for 𝐁𝐅 on F"""
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    ctx = (context or FormContext(pair, tree)).with_params(params)
    problem = FluctuationProblem(ctx, F, forest, params)
    if problem.trivial:
        return 0.0

    rng = np.random.default_rng([int(seed), 3])
    starts = [
        bf_function(pair, F, tree, rng, family, forest).values for family in BF_FAMILIES for _ in range(STARTS_PER_FAMILY)
    ]
    best = max(problem.ratio(f) for f in starts)
    f = max(starts, key=problem.ratio)
    for _ in range(budget):
        image = problem.reduced @ f
        norm = np.linalg.norm(image)
        if norm == 0:
            image = rng.standard_normal(image.shape[0])
            norm = np.linalg.norm(image)
        g_coordinates = image / norm
        candidate = problem.best_f(g_coordinates @ problem.reduced)
        if candidate is None:
            break
        value = problem.ratio(candidate)
        if value <= best * (1 + 1e-12):
            break
        best, f = value, candidate
    return best


def bounded_fluctuation_sup(
    pair: WeightPair,
    tree: DyadicTree,
    params: GoodnessParams,
    samples: int = DEFAULT_SAMPLES,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    context: Optional[FormContext] = None,
) -> float:
    """Largest bounded-fluctuation lower bound over the stopping intervals of sampled f"""
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    ctx = (context or FormContext(pair, tree)).with_params(params)
    best = 0.0
    for f in sampled_functions(pair.sigma, tree, samples, seed):
        forest = f_stopping_tree(pair.sigma, f, tree.root, tree)
        for F in forest.nodes():
            best = max(best, bounded_fluctuation_constant(pair, F, forest, params, tree, budget, seed, ctx))
    logger.debug(f"Bounded fluctuation lower bound {best}")
    return best
