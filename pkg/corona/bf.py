"""
The stop form of one stopping interval, bounded-fluctuation test functions, and the
reduction of the stop form to B_⋐
"""

import logging
import math
from typing import Iterator, List, Optional

import numpy as np

from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from forms.split import FormContext, NestedTerm, node_means
from models.data_models import DyadicInterval, GoodnessParams, WeightedFunction, WeightPair
from models.errors import DomainError
from models.forest import StoppingForest
from models.reports import BFReductionReport

logger = logging.getLogger(__name__)

BF_FAMILIES = ("random", "spike", "two_level")


def _stop_parents(F: DyadicInterval, stopping: Optional[StoppingForest], tree: DyadicTree) -> np.ndarray:
    """Heap id of π I for every I, with F standing in for the whole of F when no forest is given"""
    tree.check(F)
    if stopping is None:
        stopping = StoppingForest(F)
    elif F not in stopping:
        raise DomainError(f"{F} is not a stopping interval of the given forest")
    return stopping.parent_ids(tree.size)


def stop_form_terms(
    ctx: FormContext,
    F: DyadicInterval,
    f_values: np.ndarray,
    phi_values: np.ndarray,
    r: int,
    stopping: Optional[StoppingForest] = None,
) -> Iterator[NestedTerm]:
    """The J ⋐ I pairs of the stop form: π I = π J = F"""
    parents = _stop_parents(F, stopping, ctx.tree)
    for term in ctx.nested_terms(f_values, phi_values, r):
        if parents[term.J.node_id] == F.node_id and parents[term.I.node_id] == F.node_id:
            yield term


def stop_form(
    pair: WeightPair,
    f: WeightedFunction,
    phi: WeightedFunction,
    F: DyadicInterval,
    params: GoodnessParams,
    tree: DyadicTree,
    stopping: Optional[StoppingForest] = None,
    context: Optional[FormContext] = None,
) -> float:
    """B_stop(f, φ) = Σ_{π I = F} Σ_{J ⋐ I, π J = F} E_{I_J}Δ_I f·⟨H_σ I_J, Δ_J φ⟩_w"""
    ctx = (context or FormContext(pair, tree)).with_params(params)
    terms = stop_form_terms(ctx, F, f.values, phi.values, params.r, stopping)
    return math.fsum(t.coefficient * t.pairing(t.lo, t.hi) for t in terms)


def stop_form_matrix(
    ctx: FormContext, F: DyadicInterval, r: int, stopping: Optional[StoppingForest] = None
) -> np.ndarray:
    """M with B_stop(f, g) = g·M·f over the atoms of w and σ"""
    parents = _stop_parents(F, stopping, ctx.tree)
    sigma_masses = ctx.pair.sigma.masses
    w_masses = ctx.pair.w.masses
    sigma_lo, sigma_hi = ctx.sigma_index.node_bounds()
    node_sigma = ctx.sigma_index.node_masses()
    w_lo, w_hi = ctx.w_index.node_bounds()
    node_w = ctx.w_index.node_masses()
    A = ctx.atom_prefix

    M = np.zeros((len(ctx.pair.w), len(ctx.pair.sigma)))
    for node in ctx.w_basis.ids:
        J = DyadicInterval.from_node_id(int(node))
        if J.level <= r or parents[node] != F.node_id:
            continue
        lo, hi = int(w_lo[node]), int(w_hi[node])
        left_id, right_id = 2 * int(node) + 1, 2 * int(node) + 2
        split = int(w_hi[left_id])
        for gap in range(r + 1, J.level + 1):
            I = J.ancestor(J.level - gap)
            if parents[I.node_id] != F.node_id:
                continue
            child = J.ancestor(J.level - gap + 1)
            a, b = int(sigma_lo[child.node_id]), int(sigma_hi[child.node_id])
            if a == b:
                continue
            s = A[lo:hi, b] - A[lo:hi, a]
            s_left, s_right = s[: split - lo].sum(), s[split - lo :].sum()
            u = np.empty(hi - lo)
            u[: split - lo] = s_left / node_w[left_id]
            u[split - lo :] = s_right / node_w[right_id]
            u = w_masses[lo:hi] * (u - (s_left + s_right) / node_w[node])

            ia, ib = int(sigma_lo[I.node_id]), int(sigma_hi[I.node_id])
            e = np.zeros(len(ctx.pair.sigma))
            e[ia:ib] -= sigma_masses[ia:ib] / node_sigma[I.node_id]
            e[a:b] += sigma_masses[a:b] / node_sigma[child.node_id]
            M[lo:hi, :] += np.outer(u, e)
    return M


def fluctuation(
    f: WeightedFunction, F: DyadicInterval, tree: DyadicTree, stopping: Optional[StoppingForest] = None
) -> float:
    """max E_I|f| over massive I ⊂ F not inside a stopping child of F"""
    parents = _stop_parents(F, stopping, tree)
    index = TreeIndex(f.weight, tree)
    averages = node_means(index, np.abs(f.values))
    masses = index.node_masses()
    free = (parents == F.node_id) & (masses > 0)
    return float(averages[free].max(initial=0.0))


def bf_function(
    pair: WeightPair,
    F: DyadicInterval,
    tree: DyadicTree,
    rng: np.random.Generator,
    family: str = "random",
    stopping: Optional[StoppingForest] = None,
) -> WeightedFunction:
    """A function of bounded fluctuation on F: supported on F, constant on stopping children, max E_I|f| = 1"""
    if family not in BF_FAMILIES:
        raise DomainError(f"Unknown bounded-fluctuation family {family!r}; expected one of {BF_FAMILIES}")
    sigma = pair.sigma
    index = TreeIndex(sigma, tree)
    support = index.atom_slice(F)
    children = stopping.children(F) if stopping is not None else []
    values = np.zeros(len(sigma))

    if family == "random":
        values[support] = rng.standard_normal(support.stop - support.start)
    elif family == "spike":
        if support.stop > support.start:
            values[int(rng.integers(support.start, support.stop))] = 1.0
    else:
        levels = max(tree.depth - F.level, 1)
        K = DyadicInterval(F.level, F.index)
        for _ in range(int(rng.integers(1, levels + 1))):
            if K.level >= tree.depth:
                break
            K = K.children()[int(rng.integers(0, 2))]
        values[support] = -1.0
        values[index.atom_slice(K)] = 1.0

    for child in children:
        run = index.atom_slice(child)
        if run.stop > run.start:
            values[run] = np.average(values[run], weights=sigma.masses[run])

    f = WeightedFunction(sigma, values)
    peak = fluctuation(f, F, tree, stopping)
    return f * (1.0 / peak) if peak > 0 else f


def _check_support(f: WeightedFunction, F: DyadicInterval, tree: DyadicTree, name: str) -> None:
    run = TreeIndex(f.weight, tree).atom_slice(F)
    outside = np.concatenate([f.values[: run.start], f.values[run.stop :]])
    if np.any(outside != 0):
        raise DomainError(f"{name} must be supported on {F}")


def bf_reduction_check(
    pair: WeightPair,
    F: DyadicInterval,
    f: WeightedFunction,
    g: WeightedFunction,
    params: GoodnessParams,
    tree: DyadicTree,
    context: Optional[FormContext] = None,
) -> BFReductionReport:
    """B_⋐ (pairs with J ⊂ F) against B_stop on F, and the telescoping of the boundary terms

    The difference consists of the pairs with I ⊋ F, whose argument I_F splits as F plus I_F∖F.
    Σ_{I⊋F} E_F Δ_I f·(1_{I_F} − 1_F) telescopes to E_{F_m}f − E_{root}f on F_m∖F_{m−1}, where
    F_m are the ancestors of F; for f with σ-mean zero it vanishes.
    """
    tree.check(F)
    _check_support(f, F, tree, "f")
    _check_support(g, F, tree, "g")
    ctx = (context or FormContext(pair, tree)).with_params(params)
    sigma_lo, sigma_hi = ctx.sigma_index.node_bounds()
    fa, fb = int(sigma_lo[F.node_id]), int(sigma_hi[F.node_id])

    stop_terms, sub_terms, boundary, outside = [], [], [], []
    for term in ctx.nested_terms(f.values, g.values, params.r):
        if not F.contains(term.J):
            continue
        whole = term.coefficient * term.pairing(term.lo, term.hi)
        sub_terms.append(whole)
        if F.contains(term.I):
            stop_terms.append(whole)
            continue
        boundary.append(term.coefficient * term.pairing(fa, fb))
        outside.append(term.coefficient * (term.pairing(term.lo, fa) + term.pairing(fb, term.hi)))

    B_stop, B_sub = math.fsum(stop_terms), math.fsum(sub_terms)
    boundary_term, outside_term = math.fsum(boundary), math.fsum(outside)

    means = node_means(ctx.sigma_index, f.values)
    r_values = telescoping_function(F, means, ctx.sigma_index)
    expected = np.zeros(len(pair.sigma))
    for m in range(F.level - 1, -1, -1):
        ring = _ring(F, m, ctx.sigma_index)
        expected[ring] = means[F.ancestor(m).node_id] - means[0]
    telescoping = float(np.max(np.abs(r_values - expected), initial=0.0))

    pairing_F = float(g.values @ ctx.atom_form[:, fa:fb].sum(axis=1))
    report = BFReductionReport(
        root=F,
        telescoping_residual=telescoping,
        telescoping_sup=float(np.max(np.abs(r_values), initial=0.0)),
        B_stop=B_stop,
        B_sub=B_sub,
        boundary_term=boundary_term,
        outside_term=outside_term,
        identity_residual=(B_sub - B_stop) - (boundary_term + outside_term),
        mean_term=abs(means[F.node_id] * pairing_F),
    )
    logger.debug(f"BF reduction on {F}: identity residual {report.identity_residual:.3e}")
    return report


def _ring(F: DyadicInterval, level: int, index: TreeIndex) -> List[int]:
    """σ atoms of F's level-`level` ancestor outside its level-(level+1) ancestor"""
    outer = index.atom_slice(F.ancestor(level))
    inner = index.atom_slice(F.ancestor(level + 1))
    return list(range(outer.start, inner.start)) + list(range(inner.stop, outer.stop))


def telescoping_function(F: DyadicInterval, means: np.ndarray, index: TreeIndex) -> np.ndarray:
    """r(x) = Σ_{I ⊋ F} E_F Δ_I f·(1_{I_F} − 1_F)(x) at every σ atom"""
    r_values = np.zeros(len(index.weight))
    for level in range(F.level - 1, -1, -1):
        I = F.ancestor(level)
        I_F = F.ancestor(level + 1)
        jump = means[I_F.node_id] - means[I.node_id]
        run = index.atom_slice(I_F)
        r_values[run] += jump
        r_values[index.atom_slice(F)] -= jump
    return r_values
