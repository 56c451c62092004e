"""Exception hierarchy shared by all estimation modules."""


class QuantfuncError(Exception):
    """Base class for all library-specific errors."""


class DomainError(QuantfuncError, ValueError):
    """An argument is outside its mathematical domain."""


class DataError(QuantfuncError, ValueError):
    """Input data violates a validity requirement (shape, finiteness, size)."""


class IdentifiabilityError(QuantfuncError, ValueError):
    """The design matrix does not identify the requested parameters."""


class SolverFailure(QuantfuncError, RuntimeError):
    """An optimizer terminated without certifying optimality.

    Carries the best iterate found so callers can inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
