"""
Result records returned by the lab's checks and estimators
"""

import math
from dataclasses import dataclass, field, fields
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from .data_models import DyadicInterval, Provenance, format_position


def _key(key: Any) -> Any:
    if isinstance(key, Enum):
        return key.value
    if isinstance(key, DyadicInterval):
        return str(key)
    return key


def to_jsonable(value: Any) -> Any:
    """Plain-JSON view of report values (intervals as {level, index}, floats as floats)"""
    if isinstance(value, DyadicInterval):
        return value.to_dict()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return format_position(value)
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {_key(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


class Report:
    """to_dict for dataclass reports"""

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: to_jsonable(getattr(self, f.name)) for f in fields(self)}


def relative_residual(residual: float, scale: float) -> float:
    return abs(residual) / (abs(scale) + 1.0)


@dataclass
class MonotonicityReport(Report):
    """|⟨Hν, h_J⟩_w| against ⟨Hμ, h_J⟩_w for |ν| ≤ μ supported away from J"""

    interval: DyadicInterval
    signed_pairing: float
    dominating_pairing: float
    tolerance: float
    holds: bool


@dataclass
class TaylorReport(Report):
    """Both sides of the Taylor refinement and the calibrated ratio"""

    interval: DyadicInterval
    lhs: float
    pairing: float
    error_term: float
    constant: float
    ratio: float


@dataclass
class SplitReport(Report):
    """Every component of the splitting cascade for one (f, φ)"""

    B: float
    B11: float
    B12: float
    B13: float
    B21: float
    B22: float
    B23: float
    B31: float
    B32: float
    B_sub: float
    B_sup: float
    root_terms: float = 0.0
    mean_zero: bool = True

    @property
    def residuals(self) -> Dict[str, float]:
        return {
            "B=B11+B12+B13": self.B - self.root_terms - self.B11 - self.B12 - self.B13,
            "B13=B21+B22+B23": self.B13 - self.B21 - self.B22 - self.B23,
            "B23=B31+B32": self.B23 - self.B31 - self.B32,
            "B32=B_sub": self.B32 - self.B_sub,
        }

    @property
    def max_relative_residual(self) -> float:
        return max(relative_residual(r, self.B) for r in self.residuals.values())

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["residuals"] = self.residuals
        data["max_relative_residual"] = self.max_relative_residual
        return data


@dataclass
class SchurReport(Report):
    """Schur-test sums for one interval I and scale gap s"""

    interval: DyadicInterval
    s: int
    count: int
    alpha_sum: float
    factor_a: float
    factor_b: float
    a2: float
    constant: float

    @property
    def product_holds(self) -> bool:
        return self.alpha_sum**2 <= self.factor_a * self.factor_b * (1 + 1e-12) + 1e-300


@dataclass
class DecayReport(Report):
    """Poisson decay ratio for J ⊂ I ⊂ I′ with |J| = 2^{-s}|I|"""

    inner: DyadicInterval
    middle: DyadicInterval
    outer: DyadicInterval
    s: int
    ratio: float
    bound: float
    holds: bool


@dataclass
class CoronaSplitReport(Report):
    """B₁, B₂, B₃ per stopping interval and the regrouping residual against B_⋐"""

    per_stop: List[Dict[str, Any]]
    B1: float
    B2: float
    B3: float
    B_sub: float

    @property
    def residual(self) -> float:
        return self.B_sub - (self.B1 + self.B2 + self.B3)

    @property
    def relative_residual(self) -> float:
        return relative_residual(self.residual, self.B_sub)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["residual"] = self.residual
        data["relative_residual"] = self.relative_residual
        return data


@dataclass
class StopFormReport(Report):
    """Dini regrouping of the stop form below one stopping interval F"""

    root: DyadicInterval
    per_stop: List[Dict[str, Any]]
    B1: float
    B2: float
    B3: float
    B_stop: float
    max_b: float
    pairs: int

    @property
    def residual(self) -> float:
        return self.B_stop - (self.B1 + self.B2 - self.B3)

    @property
    def relative_residual(self) -> float:
        return relative_residual(self.residual, self.B_stop)

    @property
    def b_bounded(self) -> bool:
        return self.max_b <= 2.0 + 1e-12

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["residual"] = self.residual
        data["relative_residual"] = self.relative_residual
        return data


@dataclass
class BFReductionReport(Report):
    """Telescoping of the boundary terms and the B_stop versus B_⋐ identity on F"""

    root: DyadicInterval
    telescoping_residual: float
    telescoping_sup: float
    B_stop: float
    B_sub: float
    boundary_term: float
    outside_term: float
    identity_residual: float
    mean_term: float

    @property
    def holds(self) -> bool:
        scale = abs(self.B_stop) + abs(self.B_sub) + 1.0
        return self.telescoping_residual <= 1e-9 and abs(self.identity_residual) <= 1e-9 * scale


@dataclass
class ProjectionReport(Report):
    """Corona projection bookkeeping"""

    w_energy: float
    phi_norm_squared: float
    sigma_energy: float
    f_norm_squared: float
    max_w_multiplicity: int
    max_sigma_multiplicity: int
    w_orthogonality: float


CONSTANT_NAMES = (
    "A2",
    "H",
    "H_star",
    "W",
    "E_energy",
    "E_energy_star",
    "Psi",
    "Psi_star",
    "F_func",
    "F_func_star",
    "BF",
    "BF_star",
    "B_norm",
    "B_sub_norm",
    "B_sup_norm",
)

RATIO_NAMES = (
    "B_sub/(H+F+BF)",
    "F/Psi",
    "(F+BF)/(sqrtA2+W+B_sub)",
    "(B_sub+B_sup)/B",
)


def safe_ratio(numerator: float, denominator: float) -> float:
    """numerator/denominator, 0 for 0/0 and inf for x/0"""
    if denominator > 0:
        return numerator / denominator
    return 0.0 if numerator == 0 else math.inf


@dataclass
class ConstantsReport(Report):
    """Named constants of one weight pair, each tagged with its provenance"""

    values: Dict[str, float] = field(default_factory=dict)
    provenance: Dict[str, Provenance] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)

    def set(self, name: str, value: float, provenance: Provenance) -> None:
        if name not in CONSTANT_NAMES:
            raise KeyError(f"Unknown constant {name}")
        self.values[name] = float(value)
        self.provenance[name] = Provenance(provenance)

    def get(self, name: str, default: float = 0.0) -> float:
        return self.values.get(name, default)

    def ratios(self) -> Dict[str, float]:
        v = self.get
        return {
            "B_sub/(H+F+BF)": safe_ratio(v("B_sub_norm"), v("H") + v("F_func") + v("BF")),
            "F/Psi": safe_ratio(v("F_func"), v("Psi")),
            "(F+BF)/(sqrtA2+W+B_sub)": safe_ratio(
                v("F_func") + v("BF"), math.sqrt(v("A2")) + v("W") + v("B_sub_norm")
            ),
            "(B_sub+B_sup)/B": safe_ratio(v("B_sub_norm") + v("B_sup_norm"), v("B_norm")),
        }

    def row(self) -> Dict[str, Any]:
        """One flat row: constants in fixed order followed by the ratios"""
        row: Dict[str, Any] = {name: self.values.get(name) for name in CONSTANT_NAMES}
        row.update(self.ratios())
        return row

    def to_dict(self) -> Dict[str, Any]:
        return {
            "values": {name: self.values[name] for name in CONSTANT_NAMES if name in self.values},
            "provenance": {name: self.provenance[name].value for name in CONSTANT_NAMES if name in self.provenance},
            "ratios": self.ratios(),
            "params": to_jsonable(self.params),
        }


@dataclass
class CheckResult(Report):
    """One assertable or evidence-only check on one instance"""

    suite: str
    check: str
    seed: int
    family: str
    passed: bool
    value: Optional[float] = None
    detail: str = ""
    assertable: bool = True
    instance_path: Optional[str] = None
