"""
Weight-family generators

σ-side atoms sit one third of the way into each leaf and w-side atoms two thirds of the
way in, so a σ-family and a w-family generated on one tree never share a position.
"""

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from models.data_models import Atom, Weight, parse_position
from models.errors import ConfigurationError, DomainError

from .tree import DyadicTree

logger = logging.getLogger(__name__)

FAMILY_KINDS = ("uniform", "power", "cantor", "random_masses", "explicit_atoms", "doubling")
SIDE_OFFSETS = {"sigma": 1, "w": 2}
SIDE_STREAMS = {"sigma": 0, "w": 1}


@dataclass(frozen=True)
class WeightFamilySpec:
    """A weight family name plus its single optional parameter

    `param` is α for power, the level count for cantor, c for doubling and the keep
    probability for random_masses. `source` is the JSON file behind explicit_atoms.
    """

    kind: str
    param: Optional[float] = None
    source: Optional[str] = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ConfigurationError(f"Unknown weight family {self.kind!r}; expected one of {FAMILY_KINDS}")

    @classmethod
    def parse(cls, text: str) -> "WeightFamilySpec":
        """Parse 'name' or 'name:param', e.g. 'power:0.5' or 'explicit_atoms:weights.json'"""
        name, _, raw = str(text).strip().partition(":")
        if name == "explicit_atoms":
            return cls(name, source=raw or None)
        if not raw:
            return cls(name)
        try:
            return cls(name, param=float(raw))
        except ValueError:
            raise ConfigurationError(f"Family parameter must be numeric in {text!r}")

    @property
    def label(self) -> str:
        if self.source:
            return f"{self.kind}:{self.source}"
        if self.param is None:
            return self.kind
        return f"{self.kind}:{self.param:g}"

    def __str__(self) -> str:
        return self.label


def leaf_positions(tree: DyadicTree, side: str) -> List[Fraction]:
    """One exact position per leaf at the side's offset"""
    if side not in SIDE_OFFSETS:
        raise ConfigurationError(f"Unknown weight side {side!r}; expected 'sigma' or 'w'")
    offset = SIDE_OFFSETS[side]
    denominator = 3 << tree.depth
    return [Fraction(3 * k + offset, denominator) for k in range(1 << tree.depth)]


def _power_masses(positions: List[Fraction], alpha: float) -> np.ndarray:
    x = np.array([float(p) for p in positions])
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        raw = np.power(x, alpha)
        total = raw.sum()
    if not (np.all(np.isfinite(raw)) and math.isfinite(total) and total > 0):
        raise ConfigurationError(f"power({alpha}) produces non-finite masses at this depth")
    return raw / total


def cantor_kept(level: int) -> np.ndarray:
    """Indicator of the level-`level` intervals surviving middle-halves removal

    Each removal step keeps the outer quarters of an interval, i.e. base-4 digits 0 and 3.
    An odd trailing level keeps both halves.
    """
    index = np.arange(1 << level)
    kept = np.ones(1 << level, dtype=bool)
    for step in range(level // 2):
        digit = (index >> (level - 2 * step - 2)) & 3
        kept &= (digit == 0) | (digit == 3)
    return kept


def _cantor_masses(tree: DyadicTree, levels: int) -> np.ndarray:
    if not 0 <= levels <= tree.depth:
        raise ConfigurationError(f"cantor levels must lie in [0, {tree.depth}], got {levels}")
    kept = cantor_kept(levels)
    per_leaf = np.repeat(kept.astype(float), 1 << (tree.depth - levels))
    return per_leaf / per_leaf.sum()


def _random_masses(tree: DyadicTree, rng: np.random.Generator, keep: float) -> np.ndarray:
    if not 0 < keep <= 1:
        raise ConfigurationError(f"random_masses keep probability must lie in (0, 1], got {keep}")
    masses = rng.exponential(1.0, 1 << tree.depth)
    mask = rng.random(1 << tree.depth) < keep
    if not mask.any():
        mask[int(np.argmax(masses))] = True
    masses = np.where(mask, masses, 0.0)
    return masses / masses.sum()


def doubling_masses(depth: int, c: float, rng: np.random.Generator) -> np.ndarray:
    """Multiplicative cascade: every split sends a fraction in [√c, 1 − √c] to the left child"""
    if not 0 < c <= 0.25:
        raise ConfigurationError(f"doubling constant must lie in (0, 1/4], got {c}")
    low = math.sqrt(c)
    masses = np.ones(1)
    for _ in range(depth):
        split = rng.uniform(low, 1.0 - low, size=masses.shape[0])
        masses = np.column_stack([masses * split, masses * (1.0 - split)]).reshape(-1)
    return masses


def load_atoms(source: Any) -> List[Atom]:
    """Atoms from a weight spec JSON: a path, a dict, or a bare list of {pos, mass}"""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            with open(path, "r") as file:
                source = json.load(file)
        except FileNotFoundError:
            raise ConfigurationError(f"Weight spec file {path} not found")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Weight spec file {path} is not valid JSON: {e}")
    entries = source.get("atoms", []) if isinstance(source, dict) else source
    try:
        return [Atom(parse_position(entry["pos"]), float(entry["mass"])) for entry in entries]
    except (KeyError, TypeError) as e:
        raise ConfigurationError(f"Every atom needs 'pos' and 'mass': {e}")
    except DomainError as e:
        raise ConfigurationError(str(e))


def generate_weight(
    family: WeightFamilySpec,
    tree: DyadicTree,
    seed: int = 0,
    side: str = "sigma",
    atoms: Optional[List[Atom]] = None,
) -> Weight:
    """Deterministic weight of the given family on the tree's leaves"""
    if isinstance(family, str):
        family = WeightFamilySpec.parse(family)

    if family.kind == "explicit_atoms":
        if atoms is None:
            if family.source is None:
                raise ConfigurationError("explicit_atoms needs atoms or a spec file")
            atoms = load_atoms(family.source)
        weight = Weight(tuple(sorted(atoms, key=lambda a: a.position)), family=family.label, side=side)
        logger.debug(f"Loaded {len(weight)} explicit atoms")
        return weight

    positions = leaf_positions(tree, side)
    rng = np.random.default_rng([int(seed), SIDE_STREAMS[side]])

    if family.kind == "uniform":
        masses = np.full(len(positions), 1.0 / len(positions))
    elif family.kind == "power":
        masses = _power_masses(positions, 1.0 if family.param is None else family.param)
    elif family.kind == "cantor":
        levels = tree.depth if family.param is None else family.param
        if int(levels) != levels:
            raise ConfigurationError(f"cantor levels must be an integer, got {levels}")
        masses = _cantor_masses(tree, int(levels))
    elif family.kind == "random_masses":
        masses = _random_masses(tree, rng, 1.0 if family.param is None else family.param)
    else:
        masses = doubling_masses(tree.depth, 0.1 if family.param is None else family.param, rng)

    atoms = tuple(Atom(p, m) for p, m in zip(positions, masses) if m > 0)
    return Weight(atoms, family=family.label, seed=int(seed), side=side)


def weight_from_spec(spec: Dict[str, Any]) -> Weight:
    """Rebuild a weight from its spec JSON (inverse of Weight.to_spec)"""
    try:
        family = WeightFamilySpec.parse(spec["family"])
    except KeyError:
        raise ConfigurationError("Weight spec is missing 'family'")
    side = spec.get("side") or "sigma"
    if family.kind == "explicit_atoms" or "atoms" in spec:
        weight = Weight(tuple(sorted(load_atoms(spec), key=lambda a: a.position)), side=side)
        return weight
    depth = spec.get("depth")
    if depth is None:
        raise ConfigurationError(f"Weight spec for {family.label} needs a depth")
    return generate_weight(family, DyadicTree(int(depth)), int(spec.get("seed") or 0), side)
