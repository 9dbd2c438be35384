"""
Weighted Haar expansions in L²(weight)
"""

from .basis import (
    HaarBasis,
    analyze,
    expectation,
    haar_function,
    haar_scale,
    martingale_difference,
    project_good,
    synthesize,
)

__all__ = [
    "HaarBasis",
    "analyze",
    "synthesize",
    "haar_function",
    "haar_scale",
    "expectation",
    "martingale_difference",
    "project_good",
]
