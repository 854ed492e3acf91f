"""Exception types shared across the package."""


class PospolyError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(PospolyError):
    """A requested object exceeds the configured size ceiling."""


class DegenerateProblemError(PospolyError):
    """The assembled problem has no usable structure (e.g. rank-0 matrix)."""


class ConfigError(PospolyError):
    """Invalid or inconsistent configuration."""


class DivergenceError(PospolyError):
    """A solver produced a non-finite iterate."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
