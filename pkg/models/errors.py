"""
Error types raised across the twoweight lab
"""


class TwoWeightError(ValueError):
    """Base class for every error the lab raises on bad input"""


class ConfigurationError(TwoWeightError):
    """Invalid configuration: depth out of range, bad family parameters, unknown names"""


class DomainError(TwoWeightError):
    """An object is used outside the domain it was built for (interval not in tree, overlapping supports)"""


class UndefinedHaarError(DomainError):
    """Haar function requested on an interval with a massless child"""


class SingularityError(TwoWeightError):
    """Hilbert kernel evaluated at a point carrying an atom"""


class PreconditionError(TwoWeightError):
    """An operation's stated precondition does not hold"""
