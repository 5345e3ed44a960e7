"""Semantic exceptions shared across the package."""


class CapidError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CapidError, ValueError):
    """An input violates a documented contract (domain, shape, or schema)."""


class NotConvexError(ValidationError):
    """An operation that requires a convex capacity received a non-convex one."""


class InfeasibleSetError(CapidError):
    """A query on the identified set was made but the set is empty."""


class SizeLimitError(CapidError):
    """An instance exceeds a documented size cap (ground set or rule count)."""
