"""Exception types shared across the package."""


class PrivmetricsError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(PrivmetricsError, ValueError):
    """An input violates a documented precondition."""


class UnobservableEvidenceError(PrivmetricsError):
    """Conditioning on an observation with probability zero.

    Callers that sweep over observations should catch this and skip the
    offending symbol rather than invent an arbitrary posterior.
    """


class ResourceLimitError(PrivmetricsError):
    """An exhaustive enumeration would exceed the configured size cap."""


class ConvergenceError(PrivmetricsError):
    """An iterative solver hit its iteration cap before converging."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
