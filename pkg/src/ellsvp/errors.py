"""Exception types shared across the package."""


class EllSvpError(Exception):
    """Base class for library errors."""


class OracleInconsistencyError(EllSvpError):
    """A membership oracle contradicts its declared sandwiching radii."""


class UnsupportedRoundingError(EllSvpError):
    """The body cannot be brought into ``B2 <= K <= n B2`` position."""


class NotNormalizedError(EllSvpError):
    """An operation that needs a rounded body received one that is not."""


class CapExceededError(EllSvpError):
    """A combinatorial size cap was hit; ``estimate`` is the projected size."""

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class DimensionMismatchError(EllSvpError, ValueError):
    pass


class ResolutionError(EllSvpError):
    """A volume estimate was too coarse to resolve the requested quantity."""
