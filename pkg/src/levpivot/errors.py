"""Exception types raised across the package."""


class LevPivotError(Exception):
    """Base class for all errors raised by levpivot."""


class DimensionMismatchError(LevPivotError, ValueError):
    pass


class RankDeficientError(LevPivotError, ValueError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class NonSquareError(LevPivotError, ValueError):
    pass


class InfeasibleKError(LevPivotError, ValueError):
    pass


class BadInputError(LevPivotError, ValueError):
    pass


class EmptyTreeError(LevPivotError, ValueError):
    pass


class NonIntegerMassError(LevPivotError, ValueError):
    pass


class IndexOutOfRangeError(LevPivotError, IndexError):
    pass


class OutOfDomainError(LevPivotError, ValueError):
    pass


class QuadratureFailureError(LevPivotError, RuntimeError):
    pass


class ZeroPolynomialError(LevPivotError, ValueError):
    pass


class SolverDivergedError(LevPivotError, RuntimeError):
    pass


class TooLargeError(LevPivotError, ValueError):
    pass


class ImpossibleConditionError(LevPivotError, ValueError):
    pass


class NotAResidualError(LevPivotError, ValueError):
    pass


class TargetNotReachedError(LevPivotError, LookupError):
    pass
