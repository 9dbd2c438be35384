"""
Verification and evidence checks run by the explorer

Every check takes one Instance (a seed, a σ family, a w family and the experiment config)
and returns CheckResult rows. Assertable rows encode exact facts: identities, Haar axioms,
monotonicity, packing, proven bounds. Ratio rows never pass or fail.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from constants.dini import DiniTables, dini_constant, psi_table
from constants.energy import energy_constant
from constants.functional import SAMPLE_FAMILIES, sample_nonnegative
from constants.profile import DiniProfile
from constants.suite import EstimatorBudget, doubling_energy_floor, doubling_floor_holds, pair_constants
from corona.bf import bf_function, bf_reduction_check
from corona.dini import dini_stopping_tree, nontrivial_dini_tree, packing_holds, stop_form_split
from corona.split import corona_projections, cz_corona_split
from corona.stopping import classify_pair, f_stopping_tree, quasi_orthogonality
from dyadic.families import WeightFamilySpec, generate_weight
from dyadic.goodness import pair_goodness_offsets
from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from forms.norms import CROSS_CHECK_TOL, form_norm, full_matrix, operator_norm, power_iteration
from forms.schur import poisson_decay_check, schur_sum
from forms.split import FormContext, classify, split_form, theorem_remainder
from forms.testing import a2_constant, testing_constants, weak_boundedness
from haar.basis import HaarBasis, analyze, synthesize
from kernels.lemma import monotonicity_check, taylor_refinement
from models.data_models import (
    DyadicInterval,
    GoodnessParams,
    PairClass,
    SignedDensity,
    Weight,
    WeightedFunction,
    WeightPair,
)
from models.errors import DomainError
from models.reports import CONSTANT_NAMES, RATIO_NAMES, CheckResult, relative_residual, safe_ratio
from oracles.exhaustive import (
    MAX_EXHAUSTIVE_HEIGHT,
    brute_force_corona_class,
    dense_a2,
    exhaustive_dini_stopping_tree,
    exhaustive_energy_constant,
    exhaustive_f_stopping_tree,
    exhaustive_psi_table,
    exhaustive_weak_boundedness,
    grid_testing_constants,
)

from .config import ExperimentConfig

logger = logging.getLogger(__name__)

ORTHONORMALITY_TOL = 1e-12
PARSEVAL_TOL = 1e-10
IDENTITY_TOL = 1e-9
QUASI_ORTHOGONALITY_BOUND = 64.0
MAX_DECAY_GAP = 8
DEFAULT_DOUBLING_C = 0.1
CROSS_CHECK_POWER_TOL = 1e-13
CROSS_CHECK_MAX_ITER = 200_000
ORACLE_RTOL = 1e-10
TESTING_GRID_TOL = 1e-12
SCAN_MAX_DEPTH = 6
A2_GRID_SLACK = 0.01
WIDE_EPSILON = 0.48


@dataclass
class Instance:
    """One point of the seed × family grid"""

    seed: int
    sigma_family: str
    w_family: str
    config: ExperimentConfig
    weights: Optional[WeightPair] = None

    @property
    def family(self) -> str:
        return f"{self.sigma_family}|{self.w_family}"

    @cached_property
    def tree(self) -> DyadicTree:
        return DyadicTree(self.config.depth)

    @cached_property
    def params(self) -> GoodnessParams:
        return self.config.params

    @cached_property
    def pair(self) -> WeightPair:
        if self.weights is not None:
            return self.weights
        sigma = generate_weight(WeightFamilySpec.parse(self.sigma_family), self.tree, self.seed, "sigma")
        w = generate_weight(WeightFamilySpec.parse(self.w_family), self.tree, self.seed, "w")
        return WeightPair(sigma, w)

    @cached_property
    def context(self) -> FormContext:
        return FormContext(self.pair, self.tree, self.config.delta, self.params.r)

    @cached_property
    def a2(self) -> float:
        return a2_constant(self.pair, self.tree)

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([int(self.seed), 100 + stream])

    def result(
        self, check: str, passed: bool, value: Optional[float] = None, detail: str = "", assertable: bool = True
    ) -> CheckResult:
        return CheckResult(
            suite=SUITE_OF[check],
            check=check,
            seed=self.seed,
            family=self.family,
            passed=bool(passed),
            value=None if value is None else float(value),
            detail=detail,
            assertable=assertable,
        )

    def spec(self) -> Dict[str, Any]:
        """Weight spec JSONs of the pair"""
        return {"sigma": self.pair.sigma.to_spec(self.tree.depth), "w": self.pair.w.to_spec(self.tree.depth)}


@dataclass
class CheckOutcome:
    """Rows of one check on one instance plus any table entries it contributes"""

    results: List[CheckResult] = field(default_factory=list)
    constants: Dict[str, float] = field(default_factory=dict)
    ratios: Dict[str, float] = field(default_factory=dict)
    decay: List[Tuple[int, float]] = field(default_factory=list)


def haar_nodes(weight: Weight, tree: DyadicTree, min_level: int = 0) -> np.ndarray:
    """Heap ids of the intervals carrying a Haar function"""
    masses = TreeIndex(weight, tree).node_masses()
    ids = np.arange(tree.size)
    inner = tree.node_levels < tree.depth
    left = np.where(inner, 2 * ids + 1, 0)
    right = np.where(inner, 2 * ids + 2, 0)
    return np.nonzero(inner & (masses[left] > 0) & (masses[right] > 0) & (tree.node_levels >= min_level))[0]


def outside_density(sigma: Weight, I: DyadicInterval, tree: DyadicTree, rng: np.random.Generator) -> Optional[SignedDensity]:
    """A random positive density on the σ atoms outside I, or None when σ lives inside I"""
    multiplier = rng.exponential(1.0, len(sigma))
    multiplier[TreeIndex(sigma, tree).atom_slice(I)] = 0.0
    if not np.any(multiplier):
        return None
    return SignedDensity(sigma, multiplier)


def spiked_function(sigma: Weight, rng: np.random.Generator) -> WeightedFunction:
    """Random positive f plus a spike on the lightest atom, large enough to stop below the root"""
    values = rng.exponential(1.0, len(sigma))
    if len(sigma) == 0:
        return WeightedFunction(sigma, values)
    masses = sigma.masses
    total = masses.sum()
    atom = int(np.argmin(masses))
    if 4 * masses[atom] < total:
        rest = float(masses @ values - masses[atom] * values[atom])
        values[atom] = 8.0 * rest / (total - 4 * masses[atom]) + 1.0
    return WeightedFunction(sigma, values)


def haar_axioms(inst: Instance) -> CheckOutcome:
    out = CheckOutcome()
    rng = inst.rng(0)
    for side, weight in (("sigma", inst.pair.sigma), ("w", inst.pair.w)):
        if len(weight) == 0:
            continue
        basis = HaarBasis(weight, inst.tree)
        M = basis.matrix
        gram = M.T @ (weight.masses[:, None] * M)
        diagonal = np.diag(gram)
        off = float(np.max(np.abs(gram - np.diag(diagonal)), initial=0.0))
        unit = float(np.max(np.abs(diagonal - 1.0), initial=0.0))
        out.results.append(
            inst.result(
                "haar_axioms", off <= ORTHONORMALITY_TOL and unit <= PARSEVAL_TOL, max(off, unit), f"{side} orthonormality"
            )
        )
        bound = float(np.max(basis.child_bound(), initial=0.0))
        out.results.append(inst.result("haar_axioms", bound <= 1.0 + 1e-12, bound, f"{side} child average bound"))

        if not basis.resolved:
            out.results.append(
                inst.result("haar_axioms", True, None, f"{side} has several atoms in a leaf; Parseval skipped", False)
            )
            continue
        f = WeightedFunction(weight, rng.standard_normal(len(weight)))
        coefficients = analyze(weight, f, inst.tree, basis)
        norm_squared = f.norm() ** 2
        parseval = abs(norm_squared - coefficients.energy()) / norm_squared
        rebuilt = synthesize(coefficients, weight, inst.tree, basis)
        reconstruction = float(np.max(np.abs(rebuilt.values - f.values)) / np.max(np.abs(f.values)))
        out.results.append(inst.result("haar_axioms", parseval <= PARSEVAL_TOL, parseval, f"{side} Parseval"))
        out.results.append(
            inst.result("haar_axioms", reconstruction <= PARSEVAL_TOL, reconstruction, f"{side} reconstruction")
        )
    return out


def unresolved(inst: Instance, check: str) -> Optional[CheckOutcome]:
    """An evidence-only outcome when some leaf holds several atoms of a weight"""
    if inst.context.resolved:
        return None
    return CheckOutcome(results=[inst.result(check, True, None, "several atoms share a leaf; exact expansion skipped", False)])


def splitting_cascade(inst: Instance) -> CheckOutcome:
    skipped = unresolved(inst, "splitting_cascade")
    if skipped:
        return skipped
    pair, rng = inst.pair, inst.rng(1)
    f = WeightedFunction(pair.sigma, rng.standard_normal(len(pair.sigma)))
    phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))
    report = split_form(pair, f, phi, inst.params, inst.tree, context=inst.context)
    out = CheckOutcome()
    for name, residual in report.residuals.items():
        relative = relative_residual(residual, report.B)
        out.results.append(inst.result("splitting_cascade", relative <= IDENTITY_TOL, relative, name))
    return out


def corona_regroupings(inst: Instance) -> CheckOutcome:
    """CZ corona split, projection bookkeeping, Dini packing and stop-form split, bounded-fluctuation reduction"""
    pair, tree, params, ctx = inst.pair, inst.tree, inst.params, inst.context
    out = CheckOutcome()
    if pair.sigma.total_mass <= 0 or len(pair.w) == 0:
        out.results.append(inst.result("corona_regroupings", True, None, "empty weight", False))
        return out
    skipped = unresolved(inst, "corona_regroupings")
    if skipped:
        return skipped
    rng = inst.rng(2)
    f = spiked_function(pair.sigma, rng)
    phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))
    forest = f_stopping_tree(pair.sigma, f, tree.root, tree, inst.config.cz_threshold)
    if len(forest) < 2:
        logger.warning(f"Trivial stopping forest for seed {inst.seed} ({inst.family})")
        out.results.append(inst.result("corona_regroupings", True, len(forest), "trivial stopping forest", False))

    split = cz_corona_split(pair, f, phi, forest, params, tree, ctx)
    out.results.append(
        inst.result("corona_regroupings", split.relative_residual <= IDENTITY_TOL, split.relative_residual, "CZ corona split")
    )

    projections = corona_projections(pair, f, phi, forest, tree, ctx)
    bookkeeping = (
        projections.max_w_multiplicity <= 1
        and projections.max_sigma_multiplicity <= 2
        and projections.w_energy <= projections.phi_norm_squared * (1 + IDENTITY_TOL)
        and projections.w_orthogonality <= IDENTITY_TOL * max(projections.phi_norm_squared, 1.0)
    )
    out.results.append(
        inst.result("corona_regroupings", bookkeeping, projections.w_orthogonality, "corona projections")
    )

    F = tree.root
    g = bf_function(pair, F, tree, rng, "random", forest)
    profile = DiniProfile(params.epsilon)
    tables = DiniTables(pair, tree)
    psi = dini_constant(pair, tree, profile, params, tables)
    if psi <= 0:
        logger.warning(f"Dini constant vanishes for seed {inst.seed} ({inst.family}); stop-form split skipped")
        out.results.append(inst.result("corona_regroupings", True, 0.0, "Dini constant vanishes", False))
    else:
        dini = dini_stopping_tree(pair, F, profile, psi, params, tree, inst.config.dini_threshold, tables)
        if len(dini) < 2:
            logger.warning(f"Trivial Dini forest for seed {inst.seed} ({inst.family}); packing is vacuous")
            out.results.append(inst.result("corona_regroupings", True, 0.0, "Dini packing (trivial forest)", False))
        else:
            out.results.append(inst.result("corona_regroupings", packing_holds(dini), dini.max_packing(), "Dini packing"))
        split_forest = dini if len(dini) >= 2 else nontrivial_dini_tree(pair, F, profile, psi, params, tree, tables=tables)
        if len(split_forest) < 2:
            out.results.append(
                inst.result("corona_regroupings", True, None, "Ψ_w vanishes below F; stop-form split skipped", False)
            )
        else:
            stop = stop_form_split(pair, g, phi, F, split_forest, params, tree, forest, ctx)
            out.results.append(
                inst.result(
                    "corona_regroupings",
                    stop.relative_residual <= IDENTITY_TOL,
                    stop.relative_residual,
                    f"Dini stop-form split over {len(split_forest)} intervals",
                )
            )
            out.results.append(inst.result("corona_regroupings", stop.b_bounded, stop.max_b, "b_J bound"))

    children = forest.children(F)
    if children:
        child = children[0]
        h = bf_function(pair, child, tree, rng, "random", forest)
        local = WeightedFunction(pair.w, phi.values * TreeIndex(pair.w, tree).membership(child))
        reduction = bf_reduction_check(pair, child, h, local, params, tree, ctx)
        out.results.append(
            inst.result("corona_regroupings", reduction.holds, reduction.identity_residual, "bounded-fluctuation reduction")
        )
    return out


def monotonicity(inst: Instance) -> CheckOutcome:
    pair, tree = inst.pair, inst.tree
    out = CheckOutcome()
    rng = inst.rng(3)
    candidates = haar_nodes(pair.w, tree, min_level=1)
    if candidates.size == 0:
        out.results.append(inst.result("monotonicity", True, None, "no w Haar function below the root", False))
        return out
    J = DyadicInterval.from_node_id(int(rng.choice(candidates)))
    I = J.ancestor(int(rng.integers(1, J.level + 1)))
    mu = outside_density(pair.sigma, I, tree, rng)
    if mu is None:
        out.results.append(inst.result("monotonicity", True, None, f"σ lives inside {I}", False))
        return out
    nu = SignedDensity(pair.sigma, mu.multiplier * rng.uniform(-1.0, 1.0, len(pair.sigma)))
    report = monotonicity_check(nu, mu, J, pair.w, I)
    out.results.append(
        inst.result("monotonicity", report.holds, report.dominating_pairing - report.signed_pairing, f"J={J} outside {I}")
    )
    return out


def quasi_orthogonality_check(inst: Instance) -> CheckOutcome:
    pair, tree = inst.pair, inst.tree
    out = CheckOutcome()
    family = SAMPLE_FAMILIES[inst.seed % len(SAMPLE_FAMILIES)]
    f = sample_nonnegative(pair.sigma, tree, inst.rng(4), family)
    if f.norm() == 0 or pair.sigma.total_mass <= 0:
        out.results.append(inst.result("quasi_orthogonality", True, 0.0, "f vanishes", False))
        return out
    forest = f_stopping_tree(pair.sigma, f, tree.root, tree, inst.config.cz_threshold)
    ratio = quasi_orthogonality(forest, pair.sigma, f, tree)
    out.results.append(
        inst.result("quasi_orthogonality", ratio <= QUASI_ORTHOGONALITY_BOUND, ratio, f"{family}, {len(forest)} stops")
    )
    return out


def poisson_decay(inst: Instance) -> CheckOutcome:
    tree, params = inst.tree, inst.params
    out = CheckOutcome()
    rng = inst.rng(5)
    if tree.depth < params.r:
        out.results.append(inst.result("poisson_decay", True, None, "tree too shallow", False))
        return out
    gaps = [s for s in range(params.r, min(MAX_DECAY_GAP, tree.depth) + 1) if pair_goodness_offsets(s, params).any()]
    if not gaps:
        out.results.append(inst.result("poisson_decay", True, None, "no good J at any gap", False))
        return out
    s = int(rng.choice(gaps))
    level = int(rng.integers(0, tree.depth - s + 1))
    I = DyadicInterval(level, int(rng.integers(0, 1 << level)))
    offsets = np.nonzero(pair_goodness_offsets(s, params))[0]
    J = DyadicInterval(level + s, (I.index << s) + int(rng.choice(offsets)))
    I_prime = I.ancestor(int(rng.integers(0, level + 1)))
    report = poisson_decay_check(inst.pair, J, I, I_prime, params)
    out.decay.append((s, report.ratio))
    out.results.append(inst.result("poisson_decay", report.holds, report.ratio, f"s={s}, bound {report.bound:.6g}"))
    return out


def schur(inst: Instance) -> CheckOutcome:
    tree, params = inst.tree, inst.params
    out = CheckOutcome()
    if tree.depth < params.r:
        out.results.append(inst.result("schur", True, None, "tree too shallow", False))
        return out
    rng = inst.rng(6)
    s = int(rng.integers(params.r, tree.depth + 1))
    level = int(rng.integers(0, tree.depth - s + 1))
    I = DyadicInterval(level, int(rng.integers(0, 1 << level)))
    report = schur_sum(inst.pair, I, s, params, tree, inst.a2)
    out.results.append(inst.result("schur", report.product_holds, report.alpha_sum, f"I={I}, s={s}"))
    out.results.append(inst.result("schur", True, report.constant, "(Σα)²/A2²", False))
    return out


def good_nestings(nodes: np.ndarray, params: GoodnessParams) -> List[Tuple[DyadicInterval, int]]:
    """(J, level of I) with I above level 0, at least r levels up and J good inside I"""
    nestings = []
    for node in nodes:
        J = DyadicInterval.from_node_id(int(node))
        for top in range(1, J.level - params.r + 1):
            gap = J.level - top
            if pair_goodness_offsets(gap, params)[J.index & ((1 << gap) - 1)]:
                nestings.append((J, top))
    return nestings


def taylor(inst: Instance) -> CheckOutcome:
    pair, tree, params = inst.pair, inst.tree, inst.params
    out = CheckOutcome()
    rng = inst.rng(7)
    nestings = good_nestings(haar_nodes(pair.w, tree, min_level=params.r + 1), params)
    if not nestings:
        out.results.append(inst.result("taylor", True, None, "no w Haar function good inside a proper ancestor", False))
        return out
    J, top = nestings[int(rng.integers(len(nestings)))]
    I = J.ancestor(top)
    J_star = J.ancestor(int(rng.integers(top + params.r, J.level + 1)))
    mu = outside_density(pair.sigma, I, tree, rng)
    if mu is None:
        out.results.append(inst.result("taylor", True, None, f"σ lives inside {I}", False))
        return out
    report = taylor_refinement(mu, J, J_star, I, pair.w, params)
    out.results.append(inst.result("taylor", report.ratio <= 1.0, report.ratio, f"J={J}, J*={J_star}, I={I}"))
    return out


def doubling_floor(inst: Instance) -> CheckOutcome:
    spec = WeightFamilySpec.parse(inst.sigma_family)
    c = spec.param if spec.kind == "doubling" and spec.param is not None else DEFAULT_DOUBLING_C
    sigma = generate_weight(WeightFamilySpec("doubling", c), inst.tree, inst.seed, "sigma")
    floor = doubling_energy_floor(sigma, inst.tree)
    out = CheckOutcome()
    note = f"c={c:g}, floor/c={floor / c:.4f}"
    out.results.append(inst.result("doubling_floor", doubling_floor_holds(floor, c), floor, note))
    return out


def constants_table(inst: Instance) -> CheckOutcome:
    config, params = inst.config, inst.params
    out = CheckOutcome()
    budget = EstimatorBudget(samples=config.samples, iterations=config.budget)
    report = pair_constants(inst.pair, inst.tree, params, inst.seed, DiniProfile(params.epsilon), budget, inst.context)
    out.constants = {name: report.get(name) for name in CONSTANT_NAMES}
    out.ratios = {name: value for name, value in report.ratios().items() if name in RATIO_NAMES}

    values = list(out.constants.values())
    sound = all(math.isfinite(v) and v >= 0 for v in values)
    out.results.append(inst.result("constants", sound, min(values), "constants finite and nonnegative"))
    finite = all(math.isfinite(v) for v in out.ratios.values())
    out.results.append(inst.result("constants", finite, None, "ratio columns finite", False))
    if report.get("F_func") == 0 and report.get("F_func_star") == 0:
        logger.warning(f"No good J* below any stopping interval at depth {inst.tree.depth} (seed {inst.seed})")

    matrix = full_matrix(inst.pair)
    svd = operator_norm(matrix, "svd")
    power = power_iteration(matrix, tol=CROSS_CHECK_POWER_TOL, max_iter=CROSS_CHECK_MAX_ITER)
    gap = abs(svd - power) / max(svd, 1e-300)
    if gap > CROSS_CHECK_TOL:
        logger.warning(f"Norm methods disagree by {gap:.3e} for seed {inst.seed} ({inst.family})")
    out.results.append(inst.result("constants", gap <= CROSS_CHECK_TOL, gap, "SVD versus power iteration"))
    return out


def questions(inst: Instance) -> CheckOutcome:
    skipped = unresolved(inst, "questions")
    if skipped:
        return skipped
    pair, tree, params, ctx = inst.pair, inst.tree, inst.params, inst.context
    out = CheckOutcome()
    B = form_norm(pair, "full", params, tree)
    sub = form_norm(pair, ["sub"], params, tree, good=False, context=ctx)
    sup = form_norm(pair, ["sup"], params, tree, good=False, context=ctx)
    ratio = safe_ratio(sub + sup, B)

    rng = inst.rng(8)
    f = WeightedFunction(pair.sigma, rng.standard_normal(len(pair.sigma)))
    phi = WeightedFunction(pair.w, rng.standard_normal(len(pair.w)))
    remainder = theorem_remainder(pair, f, phi, params, tree, inst.a2, weak_boundedness(pair, params, tree), ctx)

    out.constants = {"B_norm": B, "B_sub_norm": sub, "B_sup_norm": sup}
    out.ratios = {"(B_sub+B_sup)/B": ratio, "remainder": remainder}
    out.results.append(inst.result("questions", True, ratio, "(B_sub+B_sup)/B", False))
    label = "|B − B_sub − B_sup|/((√A2 + W)‖f‖‖φ‖)"
    out.results.append(inst.result("questions", True, remainder, label, False))
    return out


def _agreement(ours, reference) -> float:
    """max |ours − reference| relative to the larger of the two, 0 when both vanish"""
    ours, reference = np.atleast_1d(np.asarray(ours, dtype=float)), np.atleast_1d(np.asarray(reference, dtype=float))
    scale = max(float(np.max(np.abs(ours), initial=0.0)), float(np.max(np.abs(reference), initial=0.0)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(ours - reference))) / scale


def oracle_variants(params: GoodnessParams, depth: int) -> List[Tuple[str, GoodnessParams]]:
    """The configured goodness plus two looser ones under which Ψ_w is nonzero on shallow trees"""
    variants = [("configured", params)]
    for label, variant in (
        ("every gap good", GoodnessParams(params.epsilon, max(params.r, depth), params.form)),
        ("wide ε", GoodnessParams(max(params.epsilon, WIDE_EPSILON), params.r, params.form)),
    ):
        if all(variant != seen for _, seen in variants):
            variants.append((label, variant))
    return variants


def _dini_rows(inst: Instance, tree: DyadicTree, label: str, params: GoodnessParams, out: CheckOutcome) -> None:
    pair = inst.pair
    profile = DiniProfile(params.epsilon)
    tables = DiniTables(pair, tree)
    gaps, ratio = [], 0.0
    for root in tree.intervals():
        if tables.sigma_masses[root.node_id] <= 0 or root.level >= tree.depth - 1:
            continue
        for s_min in sorted({1, params.r}):
            reference = exhaustive_psi_table(pair, root, profile, params, tree, s_min)
            gaps.append(_agreement(psi_table(pair, root, profile, params, tree, s_min, tables), reference))
            if s_min == 1:
                ratio = max(ratio, reference[root.node_id] / tables.sigma_masses[root.node_id])
    worst = max(gaps, default=0.0)
    out.results.append(inst.result("oracles", worst <= ORACLE_RTOL, worst, f"Ψ tables versus explicit families ({label})"))

    psi = dini_constant(pair, tree, profile, params, tables)
    gap = _agreement(psi, math.sqrt(ratio))
    out.results.append(inst.result("oracles", gap <= ORACLE_RTOL, gap, f"Dini constant versus explicit families ({label})"))
    if psi <= 0:
        skipped = f"Dini constant vanishes ({label}); stopping scan skipped"
        out.results.append(inst.result("oracles", True, 0.0, skipped, False))
        return
    table = psi_table(pair, tree.root, profile, params, tree, params.r, tables)
    masses = tables.sigma_masses
    below = [S.node_id for S in tree.intervals() if S != tree.root and masses[S.node_id] > 0]
    top = float(np.max(table[below] / masses[below], initial=0.0))
    thresholds = [inst.config.dini_threshold]
    if top > 0:
        # half the largest ratio stops at least one interval
        thresholds.append(top / (2 * psi**2))
    for threshold in thresholds:
        ours = dini_stopping_tree(pair, tree.root, profile, psi, params, tree, threshold, tables)
        reference = exhaustive_dini_stopping_tree(pair, tree.root, profile, psi, params, tree, threshold)
        out.results.append(
            inst.result(
                "oracles",
                ours.parent == reference.parent,
                len(ours),
                f"Dini stopping tree versus full scan ({label}, threshold {threshold:g})",
            )
        )


def oracles(inst: Instance) -> CheckOutcome:
    """Dynamic programs and interval sums against exhaustive references on a tree of height ≤ 4

    The CZ stopping tree and the corona classes are scanned at the configured depth up to 6.
    """
    pair, params = inst.pair, inst.params
    tree = DyadicTree(min(inst.tree.depth, MAX_EXHAUSTIVE_HEIGHT))
    out = CheckOutcome()
    if pair.sigma.total_mass <= 0 or len(pair.w) == 0:
        out.results.append(inst.result("oracles", True, None, "empty weight", False))
        return out

    gap = _agreement(energy_constant(pair, tree), exhaustive_energy_constant(pair, tree))
    out.results.append(inst.result("oracles", gap <= ORACLE_RTOL, gap, "energy constant versus explicit families"))
    for label, variant in oracle_variants(params, tree.depth):
        _dini_rows(inst, tree, label, variant, out)

    try:
        gap = _agreement(testing_constants(pair), grid_testing_constants(pair))
        out.results.append(inst.result("oracles", gap <= TESTING_GRID_TOL, gap, "H, H* versus endpoint grid"))
    except DomainError as e:
        out.results.append(inst.result("oracles", True, None, f"endpoint grid skipped: {e}", False))
    gap = _agreement(weak_boundedness(pair, params, tree), exhaustive_weak_boundedness(pair, params, tree))
    out.results.append(inst.result("oracles", gap <= ORACLE_RTOL, gap, "weak boundedness versus direct sums"))

    dense = dense_a2(pair)
    shortfall = safe_ratio(dense - inst.a2, dense)
    out.results.append(inst.result("oracles", True, shortfall, "A2 candidates versus dense grid (shortfall)", False))
    if shortfall > A2_GRID_SLACK:
        logger.warning(f"A2 candidates fall {shortfall:.2%} short of the dense grid for seed {inst.seed} ({inst.family})")

    # the full scan is quadratic in the tree size
    scan = inst.tree if inst.tree.depth <= SCAN_MAX_DEPTH else tree
    f = spiked_function(pair.sigma, inst.rng(9))
    forest = f_stopping_tree(pair.sigma, f, scan.root, scan, inst.config.cz_threshold)
    reference = exhaustive_f_stopping_tree(pair.sigma, f, scan.root, scan, inst.config.cz_threshold)
    same = forest.parent == reference.parent
    out.results.append(inst.result("oracles", same, len(forest), "CZ stopping tree versus full scan"))

    mismatches, pairs = 0, 0
    for I in scan.intervals():
        for J in scan.subtree(I):
            if classify(I, J, params) != PairClass.P23:
                continue
            pairs += 1
            mismatches += classify_pair(forest, I, J, params) != brute_force_corona_class(reference, I, J)
    out.results.append(
        inst.result("oracles", mismatches == 0, mismatches, f"corona classes of {pairs} pairs versus brute-force parents")
    )
    return out


CHECKS: Dict[str, Tuple[str, Callable[[Instance], CheckOutcome]]] = {
    "haar_axioms": ("identities", haar_axioms),
    "splitting_cascade": ("identities", splitting_cascade),
    "corona_regroupings": ("identities", corona_regroupings),
    "monotonicity": ("lemmas", monotonicity),
    "quasi_orthogonality": ("lemmas", quasi_orthogonality_check),
    "poisson_decay": ("lemmas", poisson_decay),
    "schur": ("lemmas", schur),
    "taylor": ("lemmas", taylor),
    "doubling_floor": ("lemmas", doubling_floor),
    "constants": ("constants", constants_table),
    "oracles": ("identities", oracles),
    "questions": ("questions", questions),
}

SUITE_OF = {name: suite for name, (suite, _) in CHECKS.items()}


def checks_for(suite: str) -> List[str]:
    """Check names of a suite, in registry order"""
    return [name for name, (owner, _) in CHECKS.items() if suite == "all" or owner == suite]
