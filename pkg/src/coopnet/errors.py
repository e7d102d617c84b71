"""Exception and warning types shared across the package."""


class CoopnetError(Exception):
    """Base class for all package errors."""


class ParameterError(CoopnetError, ValueError):
    """An argument is outside its admissible range."""


class DomainError(CoopnetError, ValueError):
    """A special function or formula was evaluated outside its domain."""


class SingularityError(CoopnetError, ArithmeticError):
    """A zero distance or a numerically singular Gram matrix."""


class TopologyError(CoopnetError):
    """A sampled topology cannot support the requested configuration."""


class NumericalError(CoopnetError, ArithmeticError):
    """A numerical procedure failed (non-monotone CDF, failed inversion, ...)."""


class ConfigError(CoopnetError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class SimulationError(CoopnetError):
    """Too many Monte Carlo realizations failed.

    The samples that did succeed are kept on ``partial``.
    """

    def __init__(self, message, partial=None, failures=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []
        self.failures = failures if failures is not None else []


class AccuracyWarning(UserWarning):
    """A truncated series has a non-negligible last retained term."""


class PrecisionLossWarning(UserWarning):
    """A recurrence or sum lost most of its significant digits."""
