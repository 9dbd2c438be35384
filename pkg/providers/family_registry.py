"""
Weight-family catalogue loaded from twoweight_config.yaml
"""

import logging
import os
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field

from dyadic.families import FAMILY_KINDS, WeightFamilySpec, generate_weight
from dyadic.tree import DyadicTree
from models.data_models import Weight
from models.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "twoweight_config.yaml"


class FamilyConfig(BaseModel):
    """One catalogue entry"""

    kind: str
    description: str = ""
    param: Optional[float] = Field(default=None, description="Default family parameter")


class FamilyRegistry:
    """Named weight families with their defaults, plus the run defaults and battery sizes"""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = config_path or os.getenv("TWOWEIGHT_CONFIG", DEFAULT_CONFIG_PATH)
        self.families: Dict[str, FamilyConfig] = {}
        self.defaults: Dict[str, Any] = {}
        self.battery: Dict[str, Dict[str, Any]] = {}
        self.load_config()

    def load_config(self):
        """Load the catalogue from YAML"""
        try:
            with open(self.config_path, "r") as file:
                config = yaml.safe_load(file) or {}

            for name, data in config.get("families", {}).items():
                family = FamilyConfig(**data)
                if family.kind not in FAMILY_KINDS:
                    raise ConfigurationError(f"Family {name!r} has unknown kind {family.kind!r}")
                self.families[name] = family

            self.defaults = config.get("defaults", {})
            self.battery = config.get("battery", {})

            logger.info(f"Loaded {len(self.families)} weight families from config")

        except FileNotFoundError:
            logger.error(f"Config file {self.config_path} not found")
        except Exception as e:
            logger.error(f"Error loading config: {e}")

    def get_available_families(self) -> Dict[str, str]:
        return {name: family.description for name, family in self.families.items()}

    def resolve(self, name: str) -> WeightFamilySpec:
        """Spec for a catalogue name or a 'kind:param' string; catalogue params fill in missing ones"""
        base, _, raw = str(name).partition(":")
        if base in self.families:
            family = self.families[base]
            if raw:
                return WeightFamilySpec.parse(f"{family.kind}:{raw}")
            return WeightFamilySpec(family.kind, param=family.param)
        if base in FAMILY_KINDS:
            return WeightFamilySpec.parse(name)
        raise ConfigurationError(f"Unknown weight family {name!r}; known: {sorted(self.families) or list(FAMILY_KINDS)}")

    def create_weight(self, name: str, depth: int, seed: int = 0, side: str = "sigma") -> Weight:
        return generate_weight(self.resolve(name), DyadicTree(depth), seed, side)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "families": {name: family.model_dump() for name, family in self.families.items()},
            "defaults": self.defaults,
            "battery": self.battery,
        }
