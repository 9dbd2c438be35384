"""
Weight-family catalogue for the twoweight lab
"""

from .family_registry import FamilyConfig, FamilyRegistry

__all__ = ["FamilyConfig", "FamilyRegistry"]
