"""Shared exception types."""


class CapExceededError(ValueError):
    """Raised when an exhaustive enumeration would exceed its size cap."""


class InvalidMoveError(ValueError):
    """Raised for 2-changes that are out of range or remove adjacent edges."""


class SingularMatrixError(ValueError):
    """Raised when an exact linear solve hits a rank-deficient system."""


class NotPositiveDefiniteError(ValueError):
    """Raised when a precision matrix fails its positive-definiteness check."""
