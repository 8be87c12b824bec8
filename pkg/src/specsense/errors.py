"""Exception hierarchy for specsense."""


class SpecSenseError(Exception):
    """Base class for all package errors."""


class DimensionError(SpecSenseError, ValueError):
    """Inconsistent or non-over-determined model dimensions."""


class SingularFilterError(SpecSenseError, ValueError):
    """Filter autocorrelation yields a numerically singular noise covariance."""


class DegenerateSpectrumError(SpecSenseError, ValueError):
    """Eigenvalue spectrum unusable for the requested statistic."""


class DomainError(SpecSenseError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnattainableTargetError(SpecSenseError, ValueError):
    """Requested false-alarm target cannot be reached at the given (p, N)."""

    def __init__(self, target: float, low: float, high: float):
        self.target = target
        self.attainable = (low, high)
        super().__init__(
            f"target P_f={target:g} outside attainable interval [{low:.6g}, {high:.6g}]"
        )


class ConfigError(SpecSenseError, ValueError):
    """Malformed experiment configuration."""
