"""
Data models for the twoweight lab
"""

from .data_models import (
    GOODNESS_FORMS,
    Atom,
    CoronaClass,
    DyadicInterval,
    GoodnessParams,
    HaarCoefficients,
    PairClass,
    Provenance,
    SignedDensity,
    Weight,
    WeightedFunction,
    WeightPair,
    format_position,
    parse_position,
)
from .errors import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    SingularityError,
    TwoWeightError,
    UndefinedHaarError,
)
from .forest import StoppingForest

__all__ = [
    "GOODNESS_FORMS",
    "Atom",
    "CoronaClass",
    "DyadicInterval",
    "GoodnessParams",
    "HaarCoefficients",
    "PairClass",
    "Provenance",
    "SignedDensity",
    "Weight",
    "WeightedFunction",
    "WeightPair",
    "format_position",
    "parse_position",
    "StoppingForest",
    "TwoWeightError",
    "ConfigurationError",
    "DomainError",
    "UndefinedHaarError",
    "SingularityError",
    "PreconditionError",
]
