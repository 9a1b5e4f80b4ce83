"""Exception types raised across the package."""


class SolonError(Exception):
    pass


class ConfigError(SolonError, ValueError):
    """Mechanism parameters that cannot form a valid block code."""


class Infeasible(ConfigError):
    pass


class NotDivisible(ConfigError):
    pass


class DimensionMismatch(SolonError, ValueError):
    pass


class NumericalFailure(SolonError, ArithmeticError):
    pass


class PoleAtEvaluationPoint(SolonError, ArithmeticError):
    pass


class DecodeError(SolonError):
    """Base for decode failures; carries the offending group index when known."""

    def __init__(self, message, group=None):
        super().__init__(message)
        self.group = group


class TooManyAdversaries(DecodeError):
    pass


class InsufficientHonest(DecodeError):
    pass


class SingularSubmatrix(DecodeError):
    pass


class NoConsistentSubset(DecodeError):
    pass


class AmbiguousRecovery(DecodeError):
    pass


class TooManyInSpec(SolonError, ValueError):
    pass


class NegativeInput(SolonError, ValueError):
    pass


class DigitOverflow(SolonError, ValueError):
    pass


class ParseError(SolonError, ValueError):
    pass
