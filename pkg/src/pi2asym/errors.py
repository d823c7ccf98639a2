"""Exception hierarchy shared by all modules."""


class Pi2Error(Exception):
    """Base class for all errors raised by :mod:`pi2asym`."""


class DomainError(Pi2Error, ValueError):
    """An argument lies outside the domain of the operation."""


class RegimeError(Pi2Error, ValueError):
    """The point does not belong to the asymptotic regime of the formula."""


class BranchCutError(Pi2Error, ValueError):
    """Evaluation on a branch cut without a side flag."""


class PoleError(Pi2Error, ValueError):
    pass


class DegeneracyError(Pi2Error, ValueError):
    """Two branch points have (numerically) merged.

    Raised by the elliptic-regime machinery; the edge formulas in
    :mod:`pi2asym.critical` cover these parameter values.
    """


class ConvergenceError(Pi2Error, RuntimeError):
    """An iterative procedure did not converge.

    Attributes
    ----------
    estimate : object
        Best estimate available when the iteration stopped.
    error : float
        Error estimate (or residual) attached to ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None, trace=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.trace = trace


class SolverError(ConvergenceError):
    pass


class ResolutionError(Pi2Error, RuntimeError):
    """Finite differences disagree under step halving."""


class InternalConsistencyError(Pi2Error, RuntimeError):
    """Two routes to the same quantity disagree beyond tolerance."""
