"""Exception hierarchy shared by the library and the CLI."""

from typing import Optional


class RiemoptError(Exception):
    """Base class for every error raised by this package."""


class UsageError(RiemoptError, ValueError):
    """A precondition on the inputs was violated."""


class ConfigError(UsageError):
    """An environment/.env setting could not be parsed."""


class DegenerateInputError(RiemoptError, ArithmeticError):
    """Input is numerically degenerate (rank deficient, not positive definite)."""


class SolverError(RiemoptError):
    """Internal inconsistency inside the solver."""


class LineSearchFailure(RiemoptError):
    """
    Backtracking exceeded ell_max without accepting a step.

    Carries the evaluation counters spent so far so a caller can still
    account for the work that was done.
    """

    def __init__(self, message: str, counters=None, ell: Optional[int] = None):
        super().__init__(message)
        self.counters = counters
        self.ell = ell
