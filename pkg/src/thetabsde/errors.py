"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (CLI exit code 1),
numerical breakdowns from :class:`NumericalError` (CLI exit code 2).
"""


class ThetaBSDEError(Exception):
    """Base class for all package errors."""


class ValidationError(ThetaBSDEError, ValueError):
    """Invalid input parameters."""


class NumericalError(ThetaBSDEError, ArithmeticError):
    """The computation produced an unusable result."""


class NonIntegerSplit(ValidationError):
    pass


class DelayOutOfRange(ValidationError):
    pass


class OrderOutOfRange(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class TooFewNodes(ValidationError):
    pass


class DegenerateInput(ValidationError):
    pass


class LevelNotPopulated(ThetaBSDEError, LookupError):
    pass


class NonFiniteValue(NumericalError):
    def __init__(self, level, x):
        self.level = level
        self.x = x
        super().__init__(f"non-finite value at time level n={level}, x={x!r}")


class IoFailure(ThetaBSDEError, OSError):
    pass
