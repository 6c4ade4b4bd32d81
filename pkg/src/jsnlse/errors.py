"""Exception and warning classes raised across the package."""


class JSNLSError(Exception):
    """Base class for all package errors."""


class GridError(JSNLSError, ValueError):
    """Invalid grid construction parameters."""


class OddPointCount(GridError):
    pass


class GridMismatch(JSNLSError, ValueError):
    """Two fields that must share a grid do not."""


class IncommensurateShift(JSNLSError, ValueError):
    """A displacement is not an integer multiple of the grid spacing."""


class NegativeDensity(JSNLSError, ValueError):
    pass


class NonPositiveDensity(JSNLSError, ValueError):
    """A density touches the floor where strict positivity is required."""


class DegenerateWeight(JSNLSError, ValueError):
    """Mixture weight at an endpoint of (0, 1)."""


class NonFinite(JSNLSError, FloatingPointError):
    """A field acquired NaN or Inf values during time stepping."""


class GridTooLarge(JSNLSError, ValueError):
    pass


class IndexOutOfRange(JSNLSError, IndexError):
    pass


class ConfigError(JSNLSError, ValueError):
    """Configuration problem; ``line`` is the 1-based offending line or None."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownKey(ConfigError):
    pass


class MissingKey(ConfigError):
    pass


class ConfigTypeError(ConfigError, TypeError):
    pass


class StabilityViolation(RuntimeWarning):
    """Time step exceeds the documented stability bound of a scheme."""


class FloorDominated(RuntimeWarning):
    """A divergence is dominated by the density floor (near-disjoint supports)."""
