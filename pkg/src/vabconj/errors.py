"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    pass


class NotASublattice(ValueError):
    pass


class RankDeficient(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A configurable enumeration cap was hit.

    ``partial`` may carry whatever partial result was computed before the
    budget ran out (e.g. a bracketing exponent certificate).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GroupLawError(ValueError):
    pass


class NotAHomomorphism(ValueError):
    pass


class NonUnimodular(ValueError):
    pass


class NotACocycle(ValueError):
    pass


class NonMember(ValueError):
    pass


class SplitFailure(RuntimeError):
    """Mod-p constituent search could not certify a decomposition."""
