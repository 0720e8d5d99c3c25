"""Exception types raised across the package."""


class GeoAdError(Exception):
    pass


class InvalidPlanError(GeoAdError, ValueError):
    """A plan repeats an ad on a path or references unknown nodes/ads."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"invalid plan: {self.violations}")


class PreconditionError(GeoAdError, ValueError):
    """The instance lies outside the domain a restricted solver handles."""


class InfeasibleAssignmentError(GeoAdError, ValueError):
    pass


class EnumerationLimitExceeded(GeoAdError):
    pass


class SearchTimeout(GeoAdError):
    """Raised when a solver passes its wall-clock deadline.

    Branch-and-bound attaches its incumbent as ``result``; other solvers
    leave it ``None``.
    """

    def __init__(self, message="search passed its deadline", result=None):
        self.result = result
        super().__init__(message)


class SearchBudgetExceeded(GeoAdError):
    """Branch-and-bound ran out of node expansions.

    ``result`` carries the incumbent found so far.
    """

    def __init__(self, result):
        self.result = result
        super().__init__(
            f"node budget exhausted after {result.expanded} expansions; "
            f"incumbent SW={result.sw:.6g}"
        )
