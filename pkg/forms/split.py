"""
The bilinear form B(f, φ) = ⟨H_σ f, φ⟩_w and its splitting cascade

Pair classes are decided from levels alone: with g = level(J) − level(I),
P12 is |g| ≤ r, P13 is g > r and P11 is g < −r. Inside P13 a dyadic J never straddles
∂I or ∂(3I), so J ⊂ I (P23), J ⊂ 3I∖I (P22) or J ∩ 3I = ∅ (P21).
"""

import logging
import math
from functools import cached_property
from typing import Dict, Iterator, NamedTuple, Optional

import numpy as np

from dyadic.measure import TreeIndex
from dyadic.tree import DyadicTree
from haar.basis import HaarBasis
from kernels.hilbert import cross_kernel
from models.data_models import DyadicInterval, GoodnessParams, PairClass, WeightedFunction, WeightPair
from models.errors import DomainError
from models.reports import SplitReport

logger = logging.getLogger(__name__)

ENTRY_CLASSES = (PairClass.P11, PairClass.P12, PairClass.P21, PairClass.P22, PairClass.B31, PairClass.B32)

EXPANDS_TO = {
    PairClass.P11: (PairClass.P11,),
    PairClass.P12: (PairClass.P12,),
    PairClass.P13: (PairClass.P21, PairClass.P22, PairClass.B31, PairClass.B32),
    PairClass.P21: (PairClass.P21,),
    PairClass.P22: (PairClass.P22,),
    PairClass.P23: (PairClass.B31, PairClass.B32),
    PairClass.B31: (PairClass.B31,),
    PairClass.B32: (PairClass.B32,),
}


class NestedTerm(NamedTuple):
    """One J ⋐ I pair: q is the prefix over σ atoms of ⟨H_σ(σ·), Δ_J φ⟩_w, and I_J holds σ atoms [lo, hi)"""

    J: DyadicInterval
    I: DyadicInterval
    child: DyadicInterval
    coefficient: float
    q: np.ndarray
    lo: int
    hi: int

    def pairing(self, lo: int, hi: int) -> float:
        return float(self.q[hi] - self.q[lo])


def classify(I: DyadicInterval, J: DyadicInterval, params: GoodnessParams) -> PairClass:
    """Class of the pair (I on the σ side, J on the w side)"""
    gap = J.level - I.level
    if gap < -params.r:
        return PairClass.P11
    if gap <= params.r:
        return PairClass.P12
    offset = abs(J.ancestor(I.level).index - I.index)
    if offset == 0:
        return PairClass.P23
    if offset == 1:
        return PairClass.P22
    return PairClass.P21


def class_masks(
    j_levels: np.ndarray, j_indices: np.ndarray, i_levels: np.ndarray, i_indices: np.ndarray, r: int
) -> Dict[PairClass, np.ndarray]:
    """Boolean (J, I) masks of P11, P12, P21, P22, P23 for interval index arrays"""
    gap = j_levels[:, None] - i_levels[None, :]
    p13 = gap > r
    ancestor = j_indices[:, None] >> np.maximum(gap, 0)
    offset = np.abs(ancestor - i_indices[None, :])
    return {
        PairClass.P11: gap < -r,
        PairClass.P12: np.abs(gap) <= r,
        PairClass.P21: p13 & (offset >= 2),
        PairClass.P22: p13 & (offset == 1),
        PairClass.P23: p13 & (offset == 0),
    }


def node_means(index: TreeIndex, values: np.ndarray) -> np.ndarray:
    """E_I of the values for every heap id, 0 on massless intervals"""
    lo, hi = index.node_bounds()
    cum = index.weighted_cumsum(values)
    sums = cum[hi] - cum[lo]
    masses = index.node_masses()
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(masses > 0, sums / np.where(masses > 0, masses, 1.0), 0.0)


class FormContext:
    """Everything the Haar-coordinate forms of one pair on one tree are assembled from

    A = diag(w)·G·diag(σ) with G[j, i] = 1/(y_j − x_i). T = H_wᵀA pairs every w-side Haar
    function with every σ atom, so M(J, run) = T over an atom run is ⟨H_σ(1_run σ), h_J⟩_w.
    """

    def __init__(self, pair: WeightPair, tree: DyadicTree, delta: float = 0.0, r: int = 2):
        self.pair = pair
        self.tree = tree
        self.delta = delta
        self.r = r
        self.sigma_basis = HaarBasis(pair.sigma, tree)
        self.w_basis = HaarBasis(pair.w, tree)
        self.sigma_index = self.sigma_basis.index
        self.w_index = self.w_basis.index
        if len(pair.sigma) and len(pair.w):
            G = cross_kernel(pair.w, pair.sigma, delta)
        else:
            G = np.zeros((len(pair.w), len(pair.sigma)))
        self.kernel = G
        self.atom_form = pair.w.masses[:, None] * G * pair.sigma.masses[None, :]

    @property
    def resolved(self) -> bool:
        return self.sigma_basis.resolved and self.w_basis.resolved

    @cached_property
    def atom_prefix(self) -> np.ndarray:
        """A summed over σ atoms, with a leading zero column"""
        return np.concatenate([np.zeros((self.atom_form.shape[0], 1)), np.cumsum(self.atom_form, axis=1)], axis=1)

    @cached_property
    def haar_prefix(self) -> np.ndarray:
        """T = H_wᵀA summed over σ atoms, with a leading zero column"""
        T = self.w_basis.matrix.T @ self.atom_form
        return np.concatenate([np.zeros((T.shape[0], 1)), np.cumsum(T, axis=1)], axis=1)

    @cached_property
    def child_pairings(self):
        """M(J, I₋) and M(J, I₊) for every (J, I) Haar pair"""
        P = self.haar_prefix
        b = self.sigma_basis
        left = P[:, b.mid] - P[:, b.lo]
        right = P[:, b.hi] - P[:, b.mid]
        return left, right

    @cached_property
    def haar_matrix(self) -> np.ndarray:
        """K[J, I] = ⟨H_σ h_I, h_J⟩_w"""
        left, right = self.child_pairings
        return left * self.sigma_basis.left_value[None, :] + right * self.sigma_basis.right_value[None, :]

    @cached_property
    def masks(self) -> Dict[PairClass, np.ndarray]:
        levels = self.tree.node_levels
        indices = self.tree.node_indices
        jb, ib = self.w_basis.ids, self.sigma_basis.ids
        return class_masks(levels[jb], indices[jb], levels[ib], indices[ib], self.r)

    def with_params(self, params: GoodnessParams) -> "FormContext":
        if params.r != self.r:
            self.r = params.r
            self.__dict__.pop("masks", None)
            self.__dict__.pop("entries", None)
        return self

    @cached_property
    def entries(self) -> Dict[PairClass, np.ndarray]:
        """Entry matrices of the six entry-disjoint components"""
        K = self.haar_matrix
        masks = self.masks
        left, right = self.child_pairings
        levels = self.tree.node_levels
        indices = self.tree.node_indices
        jb, ib = self.w_basis.ids, self.sigma_basis.ids
        gap = levels[jb][:, None] - levels[ib][None, :]
        # which child of I holds J; only read where J ⊊ I
        bit = (indices[jb][:, None] >> np.maximum(gap - 1, 0)) & 1
        on_left = bit == 0
        nested = masks[PairClass.P23]
        b32 = np.where(on_left, left * self.sigma_basis.left_value[None, :], right * self.sigma_basis.right_value[None, :])
        b32 = np.where(nested, b32, 0.0)
        return {
            PairClass.P11: np.where(masks[PairClass.P11], K, 0.0),
            PairClass.P12: np.where(masks[PairClass.P12], K, 0.0),
            PairClass.P21: np.where(masks[PairClass.P21], K, 0.0),
            PairClass.P22: np.where(masks[PairClass.P22], K, 0.0),
            PairClass.B31: np.where(nested, K, 0.0) - b32,
            PairClass.B32: b32,
        }

    def nested_terms(self, f_values: np.ndarray, phi_values: np.ndarray, r: int) -> Iterator[NestedTerm]:
        """Every J ⋐ I pair with E_{I_J}Δ_I f and the prefix of ⟨H_σ(1_run σ), Δ_J φ⟩_w over σ atoms

        Works from conditional averages, without Haar coefficients.
        """
        sigma_means = node_means(self.sigma_index, f_values)
        w_means = node_means(self.w_index, phi_values)
        sigma_lo, sigma_hi = self.sigma_index.node_bounds()
        w_lo, w_hi = self.w_index.node_bounds()
        A = self.atom_prefix
        for node in self.w_basis.ids:
            J = DyadicInterval.from_node_id(int(node))
            if J.level <= r:
                continue
            lo, hi = w_lo[node], w_hi[node]
            left_id, right_id = J.left_child.node_id, J.right_child.node_id
            delta = np.empty(hi - lo)
            split = w_hi[left_id] - lo
            delta[:split] = w_means[left_id] - w_means[node]
            delta[split:] = w_means[right_id] - w_means[node]
            q = delta @ A[lo:hi, :]
            for gap in range(r + 1, J.level + 1):
                I = J.ancestor(J.level - gap)
                child = J.ancestor(J.level - gap + 1)
                a, b = int(sigma_lo[child.node_id]), int(sigma_hi[child.node_id])
                if b == a:
                    continue
                coefficient = sigma_means[child.node_id] - sigma_means[I.node_id]
                yield NestedTerm(J, I, child, float(coefficient), q, a, b)

    def nested_form(self, f_values: np.ndarray, phi_values: np.ndarray, r: int) -> float:
        """Σ_{J ⋐ I} E_{I_J}Δ_I f·⟨H_σ(1_{I_J}σ), Δ_J φ⟩_w"""
        return math.fsum(t.coefficient * t.pairing(t.lo, t.hi) for t in self.nested_terms(f_values, phi_values, r))


def full_form(pair: WeightPair, f: WeightedFunction, phi: WeightedFunction, delta: float = 0.0) -> float:
    """B(f, φ) = Σ_i Σ_j σ_i f_i w_j φ_j/(y_j − x_i)"""
    if len(pair.sigma) == 0 or len(pair.w) == 0:
        return 0.0
    G = cross_kernel(pair.w, pair.sigma, delta)
    return float((pair.w.masses * phi.values) @ G @ (pair.sigma.masses * f.values))


def _check_functions(pair: WeightPair, f: WeightedFunction, phi: WeightedFunction) -> None:
    if f.weight != pair.sigma:
        raise DomainError("f must be defined on the σ atoms")
    if phi.weight != pair.w:
        raise DomainError("φ must be defined on the w atoms")


def split_form(
    pair: WeightPair,
    f: WeightedFunction,
    phi: WeightedFunction,
    params: GoodnessParams,
    tree: DyadicTree,
    good: bool = False,
    mean_zero: bool = True,
    context: Optional[FormContext] = None,
) -> SplitReport:
    """Every component of the cascade B = B11 + B12 + B13, B13 = B21 + B22 + B23, B23 = B31 + B32"""
    _check_functions(pair, f, phi)
    ctx = (context or FormContext(pair, tree)).with_params(params)
    if not ctx.resolved:
        raise DomainError(f"Both weights need at most one atom per depth-{tree.depth} leaf for an exact expansion")

    c = ctx.sigma_basis.coefficient_vector(f)
    d = ctx.w_basis.coefficient_vector(phi)
    if good:
        c = np.where(ctx.sigma_basis.good_columns(params), c, 0.0)
        d = np.where(ctx.w_basis.good_columns(params), d, 0.0)
    f0 = WeightedFunction(pair.sigma, ctx.sigma_basis.matrix @ c)
    phi0 = WeightedFunction(pair.w, ctx.w_basis.matrix @ d)

    B0 = full_form(pair, f0, phi0, ctx.delta)
    root_terms = 0.0
    B = B0
    if not mean_zero:
        f_full = f0 + WeightedFunction.constant(pair.sigma, _mean(f))
        phi_full = phi0 + WeightedFunction.constant(pair.w, _mean(phi))
        B = full_form(pair, f_full, phi_full, ctx.delta)
        root_terms = B - B0

    parts = {name: float(d @ matrix @ c) for name, matrix in ctx.entries.items()}
    b21, b22 = parts[PairClass.P21], parts[PairClass.P22]
    b31, b32 = parts[PairClass.B31], parts[PairClass.B32]
    b23 = b31 + b32
    b13 = b21 + b22 + b23

    B_sub = ctx.nested_form(f0.values, phi0.values, params.r)
    B_sup = -swapped_context(ctx).nested_form(phi0.values, f0.values, params.r)

    report = SplitReport(
        B=B,
        B11=parts[PairClass.P11],
        B12=parts[PairClass.P12],
        B13=b13,
        B21=b21,
        B22=b22,
        B23=b23,
        B31=b31,
        B32=b32,
        B_sub=B_sub,
        B_sup=B_sup,
        root_terms=root_terms,
        mean_zero=mean_zero,
    )
    logger.debug(f"Split form residual {report.max_relative_residual:.3e}")
    return report


def _mean(f: WeightedFunction) -> float:
    total = f.weight.total_mass
    return f.integral() / total if total > 0 else 0.0


def swapped_context(ctx: FormContext) -> FormContext:
    """The context of the role-swapped pair (w as the source weight)"""
    cached = ctx.__dict__.get("_swapped")
    if cached is None:
        cached = FormContext(ctx.pair.swapped(), ctx.tree, ctx.delta, ctx.r)
        ctx.__dict__["_swapped"] = cached
    return cached.with_params(GoodnessParams(r=ctx.r))


def theorem_remainder(
    pair: WeightPair,
    f: WeightedFunction,
    phi: WeightedFunction,
    params: GoodnessParams,
    tree: DyadicTree,
    a2: float,
    weak: float,
    context: Optional[FormContext] = None,
) -> float:
    """|B − B_⋐ − B_⋑|/((√A2 + W)·‖f‖·‖φ‖) on the mean-zero parts"""
    ctx = (context or FormContext(pair, tree)).with_params(params)
    report = split_form(pair, f, phi, params, tree, context=ctx)
    f_norm = np.linalg.norm(ctx.sigma_basis.coefficient_vector(f))
    phi_norm = np.linalg.norm(ctx.w_basis.coefficient_vector(phi))
    remainder = abs(report.B - report.B_sub - report.B_sup)
    scale = (math.sqrt(max(a2, 0.0)) + weak) * f_norm * phi_norm
    if remainder == 0.0:
        return 0.0
    return remainder / scale if scale > 0 else math.inf
