"""
Data models for the twoweight lab
"""

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import ConfigurationError, DomainError

GOODNESS_FORMS = ("children", "boundary")


def format_position(position: Fraction) -> str:
    """Exact string form of a rational position, e.g. '5/12'"""
    return f"{position.numerator}/{position.denominator}"


def parse_position(text: Any) -> Fraction:
    """Inverse of format_position; also accepts ints and Fractions"""
    if isinstance(text, float):
        raise ConfigurationError(f"Atom positions must be exact strings like '3/8', got float {text}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigurationError(f"Invalid atom position {text!r}: {e}")


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """Half-open dyadic interval [index·2^-level, (index+1)·2^-level) under the root [0,1)"""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.index < (1 << self.level):
            raise DomainError(f"No dyadic interval at level {self.level}, index {self.index}")

    @classmethod
    def root(cls) -> "DyadicInterval":
        return cls(0, 0)

    @classmethod
    def from_node_id(cls, node_id: int) -> "DyadicInterval":
        """Inverse of node_id (heap order: root 0, children of n are 2n+1 and 2n+2)"""
        level = (node_id + 1).bit_length() - 1
        return cls(level, node_id + 1 - (1 << level))

    @property
    def node_id(self) -> int:
        return (1 << self.level) - 1 + self.index

    @property
    def length(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    @property
    def left(self) -> Fraction:
        return Fraction(self.index, 1 << self.level)

    @property
    def right(self) -> Fraction:
        return Fraction(self.index + 1, 1 << self.level)

    @property
    def center(self) -> Fraction:
        return Fraction(2 * self.index + 1, 1 << (self.level + 1))

    @property
    def left_child(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.index)

    @property
    def right_child(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, 2 * self.index + 1)

    def children(self) -> Tuple["DyadicInterval", "DyadicInterval"]:
        return self.left_child, self.right_child

    def parent(self) -> Optional["DyadicInterval"]:
        if self.level == 0:
            return None
        return DyadicInterval(self.level - 1, self.index >> 1)

    def ancestor(self, level: int) -> "DyadicInterval":
        """The dyadic interval at the given coarser level containing this one"""
        if not 0 <= level <= self.level:
            raise DomainError(f"Level {level} is not an ancestor level of {self}")
        return DyadicInterval(level, self.index >> (self.level - level))

    def ancestors(self) -> Iterable["DyadicInterval"]:
        """Strict ancestors, nearest first"""
        for level in range(self.level - 1, -1, -1):
            yield self.ancestor(level)

    def contains(self, other: "DyadicInterval") -> bool:
        return other.level >= self.level and (other.index >> (other.level - self.level)) == self.index

    def strictly_contains(self, other: "DyadicInterval") -> bool:
        return other.level > self.level and self.contains(other)

    def contains_point(self, x: Fraction) -> bool:
        return self.left <= x < self.right

    def child_containing(self, other: "DyadicInterval") -> "DyadicInterval":
        """I_J: the child of this interval that contains J"""
        if not self.strictly_contains(other):
            raise DomainError(f"{other} is not strictly inside {self}")
        return other.ancestor(self.level + 1)

    def in_triple(self, other: "DyadicInterval") -> bool:
        """True when other ⊂ 3I (other no longer than this interval)"""
        if other.level < self.level:
            return False
        return abs((other.index >> (other.level - self.level)) - self.index) <= 1

    def distance(self, other: "DyadicInterval") -> Fraction:
        return max(Fraction(0), other.left - self.right, self.left - other.right)

    def distance_to_point(self, x: Fraction) -> Fraction:
        return max(Fraction(0), self.left - x, x - self.right)

    def to_dict(self) -> Dict[str, Any]:
        return {"level": self.level, "index": self.index}

    def __str__(self) -> str:
        return f"[{format_position(self.left)}, {format_position(self.right)})"


@dataclass(frozen=True)
class Atom:
    """Point mass at an exact rational position of [0,1)"""

    position: Fraction
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "position", Fraction(self.position))
        object.__setattr__(self, "mass", float(self.mass))
        if not 0 <= self.position < 1:
            raise DomainError(f"Atom position {self.position} outside [0,1)")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise DomainError(f"Atom mass must be finite and positive, got {self.mass}")


@dataclass(frozen=True)
class Weight:
    """Finite atomic measure on [0,1), atoms sorted by position"""

    atoms: Tuple[Atom, ...] = ()
    family: str = field(default="explicit_atoms", compare=False)
    seed: Optional[int] = field(default=None, compare=False)
    side: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for a, b in zip(atoms, atoms[1:]):
            if b.position <= a.position:
                raise DomainError(f"Atom positions must be strictly increasing: {a.position} then {b.position}")

    @classmethod
    def from_arrays(
        cls,
        positions: Sequence[Any],
        masses: Sequence[float],
        family: str = "explicit_atoms",
        seed: Optional[int] = None,
    ) -> "Weight":
        if len(positions) != len(masses):
            raise DomainError(f"{len(positions)} positions but {len(masses)} masses")
        pairs = sorted((Fraction(p), float(m)) for p, m in zip(positions, masses))
        return cls(tuple(Atom(p, m) for p, m in pairs), family=family, seed=seed)

    @classmethod
    def empty(cls) -> "Weight":
        return cls(())

    @cached_property
    def exact_positions(self) -> Tuple[Fraction, ...]:
        return tuple(a.position for a in self.atoms)

    @cached_property
    def positions(self) -> np.ndarray:
        return np.array([float(a.position) for a in self.atoms], dtype=float)

    @cached_property
    def masses(self) -> np.ndarray:
        return np.array([a.mass for a in self.atoms], dtype=float)

    @property
    def total_mass(self) -> float:
        return math.fsum(a.mass for a in self.atoms)

    @property
    def is_empty(self) -> bool:
        return len(self.atoms) == 0

    def __len__(self) -> int:
        return len(self.atoms)

    def atom_slice(self, left: Fraction, right: Fraction) -> slice:
        """Atoms with position in [left, right), as a slice of the sorted atom list"""
        return slice(bisect_left(self.exact_positions, left), bisect_left(self.exact_positions, right))

    def interval_slice(self, interval: DyadicInterval) -> slice:
        return self.atom_slice(interval.left, interval.right)

    def scaled(self, factor: float) -> "Weight":
        if factor <= 0:
            raise DomainError(f"Scaling factor must be positive, got {factor}")
        return Weight(
            tuple(Atom(a.position, a.mass * factor) for a in self.atoms), family=self.family, seed=self.seed, side=self.side
        )

    def translate(self, shift: Fraction) -> "Weight":
        """Move every atom by an exact shift modulo 1"""
        shift = Fraction(shift)
        return Weight.from_arrays([(a.position + shift) % 1 for a in self.atoms], [a.mass for a in self.atoms])

    def to_spec(self, depth: int) -> Dict[str, Any]:
        """Weight spec JSON; atoms are written whenever the family cannot regenerate them"""
        spec: Dict[str, Any] = {"family": self.family, "depth": depth, "seed": self.seed}
        if self.side is not None:
            spec["side"] = self.side
        if self.family.startswith("explicit_atoms") or self.seed is None:
            spec["family"] = "explicit_atoms"
            spec["atoms"] = [{"pos": format_position(a.position), "mass": a.mass} for a in self.atoms]
        return spec


@dataclass(frozen=True)
class WeightPair:
    """The weights σ and w; their atoms never share a position"""

    sigma: Weight
    w: Weight

    def __post_init__(self):
        shared = set(self.sigma.exact_positions) & set(self.w.exact_positions)
        if shared:
            first = format_position(min(shared))
            raise DomainError(f"sigma and w share {len(shared)} atom position(s), first at {first}")

    def swapped(self) -> "WeightPair":
        return WeightPair(self.w, self.sigma)

    def scaled(self, sigma_factor: float, w_factor: float) -> "WeightPair":
        return WeightPair(self.sigma.scaled(sigma_factor), self.w.scaled(w_factor))

    def translate(self, shift: Fraction) -> "WeightPair":
        return WeightPair(self.sigma.translate(shift), self.w.translate(shift))


@dataclass(frozen=True)
class GoodnessParams:
    """Goodness parameters (ε, r) and which goodness form governs tree goodness"""

    epsilon: float = 0.2
    r: int = 2
    form: str = "children"

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ConfigurationError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if int(self.r) != self.r or self.r < 2:
            raise ConfigurationError(f"r must be an integer >= 2, got {self.r}")
        if self.form not in GOODNESS_FORMS:
            raise ConfigurationError(f"Unknown goodness form {self.form!r}; expected one of {GOODNESS_FORMS}")

    def to_dict(self) -> Dict[str, Any]:
        return {"epsilon": self.epsilon, "r": self.r, "form": self.form}


@dataclass(frozen=True, eq=False)
class WeightedFunction:
    """A function in L²(weight), stored by its values at the weight's atoms"""

    weight: Weight
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.shape[0] != len(self.weight):
            raise DomainError(f"{values.shape[0]} values for a weight with {len(self.weight)} atoms")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, weight: Weight, value: float) -> "WeightedFunction":
        return cls(weight, np.full(len(weight), float(value)))

    @classmethod
    def zeros(cls, weight: Weight) -> "WeightedFunction":
        return cls(weight, np.zeros(len(weight)))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weight.masses * self.values**2)))

    def inner(self, other: "WeightedFunction") -> float:
        return float(np.sum(self.weight.masses * self.values * other.values))

    def integral(self) -> float:
        return float(np.sum(self.weight.masses * self.values))

    def __add__(self, other: "WeightedFunction") -> "WeightedFunction":
        return WeightedFunction(self.weight, self.values + other.values)

    def __sub__(self, other: "WeightedFunction") -> "WeightedFunction":
        return WeightedFunction(self.weight, self.values - other.values)

    def __mul__(self, factor: float) -> "WeightedFunction":
        return WeightedFunction(self.weight, self.values * float(factor))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SignedDensity:
    """The signed measure with mass m_i·multiplier_i at each atom of the weight"""

    weight: Weight
    multiplier: np.ndarray

    def __post_init__(self):
        multiplier = np.asarray(self.multiplier, dtype=float).reshape(-1)
        if multiplier.shape[0] != len(self.weight):
            raise DomainError(f"{multiplier.shape[0]} multipliers for a weight with {len(self.weight)} atoms")
        if not np.all(np.isfinite(multiplier)):
            raise DomainError("Density multipliers must be finite")
        object.__setattr__(self, "multiplier", multiplier)

    @classmethod
    def of(cls, weight: Weight) -> "SignedDensity":
        """The weight itself as a density"""
        return cls(weight, np.ones(len(weight)))

    @classmethod
    def from_function(cls, f: WeightedFunction) -> "SignedDensity":
        return cls(f.weight, f.values)

    def restricted(self, interval: DyadicInterval) -> "SignedDensity":
        """1_I·density"""
        keep = np.zeros(len(self.weight))
        keep[self.weight.interval_slice(interval)] = 1.0
        return SignedDensity(self.weight, self.multiplier * keep)

    def outside(self, interval: DyadicInterval) -> "SignedDensity":
        """1_{ℝ∖I}·density"""
        drop = np.ones(len(self.weight))
        drop[self.weight.interval_slice(interval)] = 0.0
        return SignedDensity(self.weight, self.multiplier * drop)

    @property
    def atom_masses(self) -> np.ndarray:
        return self.weight.masses * self.multiplier

    @property
    def total_variation(self) -> np.ndarray:
        return self.weight.masses * np.abs(self.multiplier)


@dataclass
class HaarCoefficients:
    """Weighted Haar expansion: root average plus one coefficient per interval with two massive children"""

    root_mean: float
    coeffs: Dict[DyadicInterval, float] = field(default_factory=dict)
    root_mass: float = 0.0

    def get(self, interval: DyadicInterval) -> float:
        return self.coeffs.get(interval, 0.0)

    def energy(self) -> float:
        """Parseval side of ‖f‖²"""
        return self.root_mean**2 * self.root_mass + math.fsum(c * c for c in self.coeffs.values())

    def mean_zero(self) -> "HaarCoefficients":
        return HaarCoefficients(0.0, dict(self.coeffs), self.root_mass)

    def to_frame(self) -> pd.DataFrame:
        rows = [{"level": I.level, "index": I.index, "value": c} for I, c in sorted(self.coeffs.items())]
        return pd.DataFrame(rows, columns=["level", "index", "value"])

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)


class PairClass(str, Enum):
    """Position of an (I, J) Haar pair in the splitting cascade"""

    P11 = "P11"
    P12 = "P12"
    P13 = "P13"
    P21 = "P21"
    P22 = "P22"
    P23 = "P23"
    B31 = "B31"
    B32 = "B32"

    @property
    def coarse(self) -> "PairClass":
        if self in (PairClass.P21, PairClass.P22, PairClass.P23):
            return PairClass.P13
        if self in (PairClass.B31, PairClass.B32):
            return PairClass.P13
        return self


class CoronaClass(str, Enum):
    C_O = "C_o"
    C_SUP = "C_sup"


class Provenance(str, Enum):
    EXACT = "exact"
    DP_EXACT = "dp_exact"
    LOWER_BOUND = "lower_bound_heuristic"
