"""Exception types shared across the package."""


class RisfdError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(RisfdError, ValueError):
    """A scenario or solver parameter is invalid or inconsistent."""


class GeometryError(RisfdError, ValueError):
    """An antenna/surface placement violates the channel model assumptions."""


class NumericalError(RisfdError, RuntimeError):
    """A solver produced a non-finite value or failed to converge safely."""
