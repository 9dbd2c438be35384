"""
Experiment configuration: validated with pydantic, loadable from CLI flags, YAML files or JSON bodies
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator

from dyadic.families import WeightFamilySpec
from dyadic.tree import DyadicTree
from models.data_models import GOODNESS_FORMS, GoodnessParams
from models.errors import ConfigurationError

logger = logging.getLogger(__name__)

SUITES = ("identities", "lemmas", "constants", "questions", "all")
NORM_SUITES = ("constants", "questions", "all")
NORM_DEPTH_LIMIT = 12
IDENTITY_DEPTH_LIMIT = 16
SEED_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")

DEFAULT_BATTERY: Dict[str, Dict[str, Any]] = {
    "haar_axioms": {"count": 50},
    "splitting_cascade": {"count": 100},
    "corona_regroupings": {"count": 50, "epsilon": 0.45},
    "monotonicity": {"count": 1000},
    "quasi_orthogonality": {"count": 500, "depth": 8},
    "poisson_decay": {"count": 200, "depth": 12, "epsilon": 0.2},
    "schur": {"count": 50},
    "taylor": {"count": 200, "depth": 10},
    "doubling_floor": {"count": 50},
    "constants": {"count": 50, "depth": 6},
    "oracles": {"count": 100, "depth": 5},
}


def parse_seeds(value: Any) -> List[int]:
    """Seeds from 'a..b' (inclusive), 'a,b,c', a single integer or a list"""
    if isinstance(value, bool):
        raise ValueError("seeds must be integers")
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        match = SEED_RANGE.match(value)
        if match:
            start, stop = int(match.group(1)), int(match.group(2))
            if stop < start:
                raise ValueError(f"empty seed range {value!r}")
            return list(range(start, stop + 1))
        try:
            return [int(part) for part in value.split(",") if part.strip()]
        except ValueError:
            raise ValueError(f"seeds must look like 'a..b' or 'a,b,c', got {value!r}")
    if isinstance(value, (list, tuple)):
        seeds = []
        for item in value:
            seeds.extend(parse_seeds(item))
        return seeds
    raise ValueError(f"unsupported seed selection {value!r}")


def parse_families(value: Any) -> List[str]:
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    if not isinstance(value, (list, tuple)) or not value:
        raise ValueError("at least one weight family is required")
    return [WeightFamilySpec.parse(str(item)).label for item in value]


class BatteryEntry(BaseModel):
    """Instance count of one verification check, with optional depth and ε overrides"""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(ge=0, description="Number of seeds")
    depth: Optional[int] = Field(default=None, ge=1, le=IDENTITY_DEPTH_LIMIT)
    epsilon: Optional[float] = Field(default=None, gt=0.0, lt=0.5)


class ExperimentConfig(BaseModel):
    """One sweep over seeds × (σ family, w family)"""

    model_config = ConfigDict(extra="forbid")

    suite: Literal["identities", "lemmas", "constants", "questions", "all"] = "all"
    depth: int = Field(default=6, ge=1, description="Tree depth")
    epsilon: float = Field(default=0.2, gt=0.0, lt=0.5, description="Goodness exponent")
    r: int = Field(default=2, ge=2, description="Goodness gap")
    goodness_form: str = Field(default="children", description="Tree goodness form")
    seeds: List[int] = Field(default_factory=lambda: [0])
    sigma_family: List[str] = Field(default_factory=lambda: ["random_masses"])
    w_family: List[str] = Field(default_factory=lambda: ["random_masses"])
    out: Optional[str] = Field(default="results", description="Output directory; None keeps everything in memory")
    delta: float = Field(default=0.0, ge=0.0, description="Kernel truncation")
    budget: int = Field(default=10, ge=0, description="Alternating-maximization iterations")
    samples: int = Field(default=4, ge=1, description="Sampled test functions per family")
    cz_threshold: float = Field(default=4.0, gt=1.0)
    dini_threshold: float = Field(default=4.0, gt=1.0)
    threads: Optional[int] = Field(default=None, ge=1)
    battery: Dict[str, BatteryEntry] = Field(default_factory=dict)

    @field_validator("seeds", mode="before")
    @classmethod
    def _seeds(cls, value: Any) -> List[int]:
        seeds = parse_seeds(value)
        if not seeds:
            raise ValueError("at least one seed is required")
        return seeds

    @field_validator("sigma_family", "w_family", mode="before")
    @classmethod
    def _families(cls, value: Any) -> List[str]:
        return parse_families(value)

    @field_validator("goodness_form")
    @classmethod
    def _form(cls, value: str) -> str:
        if value not in GOODNESS_FORMS:
            raise ValueError(f"goodness form must be one of {GOODNESS_FORMS}")
        return value

    @field_validator("depth")
    @classmethod
    def _depth_limit(cls, value: int, info: ValidationInfo) -> int:
        suite = info.data.get("suite", "all")
        limit = NORM_DEPTH_LIMIT if suite in NORM_SUITES else IDENTITY_DEPTH_LIMIT
        if value > limit:
            raise ValueError(f"depth {value} exceeds {limit} for suite {suite!r}")
        return value

    @property
    def params(self) -> GoodnessParams:
        return GoodnessParams(self.epsilon, self.r, self.goodness_form)

    @property
    def tree(self) -> DyadicTree:
        return DyadicTree(self.depth)

    @property
    def worker_threads(self) -> int:
        if self.threads:
            return self.threads
        env = os.getenv("TWOWEIGHT_THREADS")
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                logger.warning(f"Ignoring non-integer TWOWEIGHT_THREADS={env!r}")
        return os.cpu_count() or 1

    def grid(self) -> List[Tuple[int, str, str]]:
        """(seed, σ family, w family) in lexicographic order"""
        return sorted((seed, s, w) for seed in self.seeds for s in self.sigma_family for w in self.w_family)

    def battery_entries(self) -> Dict[str, BatteryEntry]:
        entries = {name: BatteryEntry(**values) for name, values in DEFAULT_BATTERY.items()}
        entries.update(self.battery)
        return entries

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _key_lines(text: str) -> Dict[str, int]:
    """1-based line of every top-level key of a YAML mapping"""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {key.value: key.start_mark.line + 1 for key, _ in node.value if isinstance(key, yaml.ScalarNode)}


def format_validation_error(error: ValidationError, source: str = "<config>", lines: Optional[Dict[str, int]] = None) -> str:
    """<source>:<line>: <field>: <message>, one line per error"""
    lines = lines or {}
    messages = []
    for item in error.errors():
        location = [str(part) for part in item.get("loc", ())]
        field = ".".join(location) or "config"
        line = lines.get(location[0], 1) if location else 1
        message = item.get("msg", "invalid value").removeprefix("Value error, ")
        messages.append(f"{source}:{line}: {field}: {message}")
    return "\n".join(messages)


def build_config(data: Dict[str, Any], source: str = "<config>", lines: Optional[Dict[str, int]] = None) -> ExperimentConfig:
    """ExperimentConfig from a plain mapping, with validation errors reformatted"""
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigurationError(format_validation_error(e, source, lines))


def load_experiment_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """ExperimentConfig from a YAML file; overrides (e.g. CLI flags) win over file values"""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigurationError(f"Config file {path} not found")
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 1
        raise ConfigurationError(f"{path}:{line}: invalid YAML: {getattr(e, 'problem', e)}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}:1: config: top level must be a mapping")
    data.update({key: value for key, value in (overrides or {}).items() if value is not None})
    config = build_config(data, str(path), _key_lines(text))
    logger.info(f"Loaded experiment config from {path}")
    return config
