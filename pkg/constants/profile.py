"""
Decay profiles ψ(s) for the Dini energy
"""

import math
from dataclasses import dataclass

from models.errors import ConfigurationError


@dataclass(frozen=True)
class DiniProfile:
    """ψ(s) = Z^{-1}·2^{-εs/2} for s ≥ 1, with Z chosen so that Σ_{s≥1} ψ(s) = 1

    With q = 2^{-ε/2} this is ψ(s) = (1 − q)·q^{s−1}. Subclasses may override `psi`
    with any decreasing positive sequence summing to 1.
    """

    epsilon: float = 0.2

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"Profile decay must be positive, got {self.epsilon}")

    @property
    def ratio(self) -> float:
        return 2.0 ** (-self.epsilon / 2.0)

    @property
    def normalizer(self) -> float:
        """Z = Σ_{s≥1} 2^{-εs/2}"""
        q = self.ratio
        return q / (1.0 - q)

    def psi(self, s: int) -> float:
        if s < 1:
            raise ConfigurationError(f"ψ is defined for s >= 1, got {s}")
        q = self.ratio
        return (1.0 - q) * q ** (s - 1)

    def partial_sum(self, upto: int) -> float:
        return math.fsum(self.psi(s) for s in range(1, upto + 1))

    def to_dict(self):
        return {"shape": "2^(-eps*s/2)", "epsilon": self.epsilon, "Z": self.normalizer}
