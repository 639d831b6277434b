"""Exception hierarchy for fwkit."""


class FWError(Exception):
    """Base class for all fwkit errors."""


class ContractViolation(FWError, ValueError):
    """An argument broke an operation's precondition (e.g. dimension mismatch)."""


class InputError(FWError, ValueError):
    """Problem data is unusable, e.g. an infeasible starting point."""


class UnsupportedRegionError(FWError, TypeError):
    """The requested operation is not available for this feasible region."""


class WrongRuleError(FWError, TypeError):
    """A schedule was requested from a data-dependent step rule."""


class NonAcceptanceError(FWError, RuntimeError):
    """Adaptive step search escalated past its budget without accepting.

    Usually means the objective is not smooth or is badly scaled.
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


class FeasibilityError(FWError, RuntimeError):
    """An iterate left the feasible region (beyond the audit tolerance)."""


class PartialResultError(FWError, RuntimeError):
    """Iteration budget ran out before the target accuracy was reached.

    The best result found so far is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class UndecidedError(FWError, RuntimeError):
    """Separation produced neither a hyperplane nor a membership witness."""

    def __init__(self, message, distance_estimate=None, result=None):
        super().__init__(message)
        self.distance_estimate = distance_estimate
        self.result = result
