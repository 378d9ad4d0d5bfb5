"""Exception types shared across the package."""


class ResonanceError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(ResonanceError, ValueError):
    """Bad or unknown configuration (kinds, keys, parameter ranges)."""


class RangeError(ResonanceError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ResourceError(ResonanceError, RuntimeError):
    """A computation would exceed a configured size limit."""
