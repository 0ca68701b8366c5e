"""Exception hierarchy shared across the package."""


class BvpaError(Exception):
    """Base class for all package errors."""


class ParameterError(BvpaError, ValueError):
    """A parameter vector or hyper-parameter is outside its domain."""


class DegenerateInputError(BvpaError, ValueError):
    """Input lies on a set where the requested quantity is not defined."""


class ConfigError(BvpaError, ValueError):
    """Invalid sampler, study or run configuration."""


class SamplerStuckError(BvpaError, RuntimeError):
    """A slice transition exceeded its proposal budget.

    ``diagnostics`` carries the sampler state at the time of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DataFormatError(BvpaError, ValueError):
    """Malformed input data file."""


class InsufficientExceedancesError(DataFormatError):
    """Too few rows survive the peak-over-threshold filter."""


class CorruptFileError(BvpaError, ValueError):
    """A serialized artifact is truncated or unreadable."""


class VersionMismatchError(CorruptFileError):
    """A serialized artifact was written by an incompatible format version."""
