"""Exception types raised by the box distance toolkit."""


class BoxDistanceError(Exception):
    """Base class for every error raised on purpose by this package."""


class DomainError(BoxDistanceError, ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class DimensionError(BoxDistanceError, ValueError):
    """Arrays that must line up (functions, weights, matrices) do not."""


class SizeLimitError(BoxDistanceError):
    """The instance is too large for the requested exact computation."""


class PreconditionError(BoxDistanceError):
    """A structural assumption of the operation does not hold."""


class UnsupportedError(BoxDistanceError):
    """The request is well formed but outside what the toolkit certifies."""


class ConfigError(BoxDistanceError, ValueError):
    """A run configuration names an unknown key or an unparsable value."""
