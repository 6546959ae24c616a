"""Exception hierarchy shared by every quasiq module."""


class QuasiqError(Exception):
    """Base class for all library errors."""


class OrderMismatch(QuasiqError):
    pass


class IndexOutOfRange(QuasiqError):
    pass


class ModuliMismatch(QuasiqError):
    pass


class GroupTooLargeForExhaustive(QuasiqError):
    pass


class InvalidCocycle(QuasiqError):
    pass


class NonSymmetricCocycle(QuasiqError):
    """Raised when the induced 2-cocycle at a degree admits no quasi-character."""

    def __init__(self, degree, witness=None):
        self.degree = degree
        self.witness = witness
        msg = f"induced 2-cocycle at degree {degree} is not symmetric"
        if witness is not None:
            msg += f" (fails at {witness})"
        super().__init__(msg)


class NonReducedCocycle(QuasiqError):
    pass


class InvalidSeries(QuasiqError):
    pass


class SpaceMismatch(QuasiqError):
    pass


class AlgebraMismatch(QuasiqError):
    pass


class DimensionLimitExceeded(QuasiqError):
    pass


class UnclassifiedSeries(QuasiqError):
    pass


class ConfigError(QuasiqError):
    pass
