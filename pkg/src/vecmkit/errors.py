"""Exception hierarchy shared by every vecmkit module."""


class VecmkitError(Exception):
    """Base class for all errors raised by vecmkit."""


class SchemaError(VecmkitError, ValueError):
    """A declared column is missing from the input file."""


class IngestionError(VecmkitError, ValueError):
    """A CSV row or cell could not be turned into a clean observation."""


class DomainError(VecmkitError, ValueError):
    """A transform was applied outside its mathematical domain."""


class InsufficientDataError(VecmkitError, ValueError):
    """Too few observations for the requested operation."""


class SingularDesignError(VecmkitError, ValueError):
    """Design matrix is rank deficient."""


class DegenerateError(VecmkitError, ValueError):
    """Input has no variation (or otherwise yields a meaningless statistic)."""


class NotPositiveDefiniteError(VecmkitError, ValueError):
    """A covariance or moment matrix is not positive definite."""


class UnsupportedOrderError(VecmkitError, ValueError):
    """A series appears to be integrated of order two or higher."""


class UnsupportedDimensionError(VecmkitError, ValueError):
    """System dimension exceeds the embedded critical-value tables."""


class RankError(VecmkitError, ValueError):
    """Cointegrating rank is incompatible with a VECM (0 or full)."""


class NormalizationError(VecmkitError, ValueError):
    """Leading block of beta is singular under the requested ordering."""


class BootstrapError(VecmkitError, RuntimeError):
    """Too many bootstrap replications failed to re-estimate."""


class SpecError(VecmkitError, ValueError):
    """A data-generating process specification violates its invariants."""


class ConfigError(VecmkitError, ValueError):
    """Pipeline configuration is invalid."""


class StageError(VecmkitError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
