"""Exception hierarchy.

Each class carries the process exit code the command line reports for it.
"""


class D2DError(Exception):
    exit_code = 1


class DomainError(D2DError, ValueError):
    """Argument outside the domain of a function."""


class NoMotifError(D2DError):
    """Fewer than three devices per cluster, so no three-node group exists."""

    exit_code = 2


class InvalidRegimeError(D2DError):
    """Closed-form baseline statistics evaluated outside their validity range."""

    exit_code = 3


class ConvergenceError(D2DError):
    """A series or quadrature failed to reach its tolerance."""

    exit_code = 4


class IntegrationError(ConvergenceError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergentIntegralError(IntegrationError):
    """Rate integral whose integrand never decays (interference/noise-free limit)."""


class UndefinedZError(D2DError):
    """Baseline standard deviation is zero, so the Z-score is undefined."""

    exit_code = 3


class ValidationFailure(D2DError):
    exit_code = 5
