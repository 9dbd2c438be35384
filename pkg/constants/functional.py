"""
Functional energy: closed-form optimum over adapted test families

For each stopping interval F the admissible g_F (supported on F, constant on the forest
children of F, w-mean zero on every J* of F) form a linear subspace A_F, and the left side
is ⟨c_F, g_F⟩_w with c_F = Σ_{J*} P(f·1_{ℝ∖F}σ, J*)·(x/|J*|)·1_{J*}. The best constant for
one f is therefore √(Σ_F ‖Proj_{A_F} c_F‖²_w)/‖f‖_σ.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional

import numpy as np
from scipy.linalg import null_space, orth

from corona.stopping import f_stopping_tree, j_star_family
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from kernels.poisson import poisson
from models.data_models import DyadicInterval, GoodnessParams, SignedDensity, Weight, WeightedFunction, WeightPair
from models.errors import DomainError
from models.forest import StoppingForest

logger = logging.getLogger(__name__)

SAMPLE_FAMILIES = ("random", "spike", "two_level")
DEFAULT_SAMPLES = 20


def adapted_basis(
    weight: Weight,
    tree: DyadicTree,
    F: DyadicInterval,
    children: Iterable[DyadicInterval],
    mean_zero_on: Iterable[DyadicInterval] = (),
) -> np.ndarray:
    """Columns g with ⟨g_a, g_b⟩_weight = δ_ab spanning the functions supported on F, constant on
    each child and with weight-mean zero on each interval of `mean_zero_on`"""
    index = TreeIndex(weight, tree)
    support = index.atom_slice(F)
    free = np.zeros(len(weight), dtype=bool)
    free[support] = True
    columns: List[np.ndarray] = []
    for child in children:
        run = index.atom_slice(child)
        if run.stop > run.start:
            column = np.zeros(len(weight))
            column[run] = 1.0
            columns.append(column)
        free[run] = False
    for atom in np.nonzero(free)[0]:
        column = np.zeros(len(weight))
        column[atom] = 1.0
        columns.append(column)
    if not columns:
        return np.zeros((len(weight), 0))
    X = np.column_stack(columns)

    constraints = [weight.masses * index.membership(J) for J in mean_zero_on]
    if constraints:
        N = null_space(np.vstack(constraints) @ X)
        if N.shape[1] == 0:
            return np.zeros((len(weight), 0))
        X = X @ N
    root_masses = np.sqrt(weight.masses)
    Q = orth(root_masses[:, None] * X)
    return Q / root_masses[:, None]


def functional_energy(
    pair: WeightPair,
    f: WeightedFunction,
    forest: StoppingForest,
    params: GoodnessParams,
    tree: DyadicTree,
) -> float:
    """√(Σ_F ‖Proj_{A_F} c_F‖²_w)/‖f‖_σ for nonnegative f and its stopping forest"""
    if f.weight != pair.sigma:
        raise DomainError("f must be defined on the σ atoms")
    if np.any(f.values < 0):
        raise DomainError("Functional energy is defined for nonnegative f")
    norm = f.norm()
    if norm == 0:
        raise DomainError("Functional energy is undefined for f = 0")

    w = pair.w
    w_index = TreeIndex(w, tree)
    density = SignedDensity.from_function(f)
    total = 0.0
    for F in forest.nodes():
        stars = j_star_family(forest, F, params, tree)
        if not stars:
            continue
        outside = density.outside(F)
        c = np.zeros(len(w))
        for J in stars:
            run = w_index.atom_slice(J)
            c[run] += poisson(outside, J) * w.positions[run] / float(J.length)
        if not np.any(c):
            continue
        basis = adapted_basis(w, tree, F, forest.children(F), stars)
        if basis.shape[1] == 0:
            continue
        coordinates = basis.T @ (w.masses * c)
        total += float(coordinates @ coordinates)
    return math.sqrt(total) / norm


def adapted_value(
    pair: WeightPair,
    f: WeightedFunction,
    forest: StoppingForest,
    params: GoodnessParams,
    tree: DyadicTree,
    g: Dict[DyadicInterval, WeightedFunction],
) -> float:
    """Left side over right side of the functional energy inequality for one explicit family {g_F}"""
    w = pair.w
    w_index = TreeIndex(w, tree)
    density = SignedDensity.from_function(f)
    lhs, g_norm = 0.0, 0.0
    for F, g_F in g.items():
        g_norm += g_F.norm() ** 2
        outside = density.outside(F)
        for J in j_star_family(forest, F, params, tree):
            run = w_index.atom_slice(J)
            lhs += poisson(outside, J) * float(np.sum(w.masses[run] * w.positions[run] * g_F.values[run])) / float(J.length)
    scale = f.norm() * math.sqrt(g_norm)
    return lhs / scale if scale > 0 else 0.0


def sample_nonnegative(sigma: Weight, tree: DyadicTree, rng: np.random.Generator, family: str) -> WeightedFunction:
    """Nonnegative test functions on σ: i.i.d. exponential, a single spike, or a two-level step"""
    if family not in SAMPLE_FAMILIES:
        raise DomainError(f"Unknown sampling family {family!r}; expected one of {SAMPLE_FAMILIES}")
    n = len(sigma)
    if family == "random":
        return WeightedFunction(sigma, rng.exponential(1.0, n))
    if family == "spike":
        values = np.zeros(n)
        if n:
            values[int(rng.integers(0, n))] = 1.0
        return WeightedFunction(sigma, values)
    level = int(rng.integers(1, tree.depth + 1))
    K = DyadicInterval(level, int(rng.integers(0, 1 << level)))
    values = np.ones(n)
    values[TreeIndex(sigma, tree).atom_slice(K)] = 4.0 ** int(rng.integers(1, 4))
    return WeightedFunction(sigma, values)


def sampled_functions(sigma: Weight, tree: DyadicTree, samples: int, seed: int) -> List[WeightedFunction]:
    """`samples` functions of every family, deterministic in seed"""
    rng = np.random.default_rng([int(seed), 2])
    out = []
    for family in SAMPLE_FAMILIES:
        out.extend(sample_nonnegative(sigma, tree, rng, family) for _ in range(samples))
    return [f for f in out if f.norm() > 0]


def functional_energy_sup(
    pair: WeightPair,
    tree: DyadicTree,
    params: GoodnessParams,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    functions: Optional[List[WeightedFunction]] = None,
) -> float:
    """Largest functional-energy ratio over sampled nonnegative f; a lower bound for 𝐅"""
    if len(pair.sigma) == 0 or len(pair.w) == 0 or pair.sigma.total_mass <= 0:
        return 0.0
    functions = functions if functions is not None else sampled_functions(pair.sigma, tree, samples, seed)
    best = 0.0
    for f in functions:
        forest = f_stopping_tree(pair.sigma, f, tree.root, tree)
        best = max(best, functional_energy(pair, f, forest, params, tree))
    logger.debug(f"Functional energy lower bound {best} over {len(functions)} functions")
    return best
