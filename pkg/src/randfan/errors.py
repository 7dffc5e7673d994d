"""Exceptions shared across the package."""


class ValidationError(ValueError):
    """Caller-supplied input violates a documented precondition."""


class InvariantError(RuntimeError):
    """An internal consistency check failed; this indicates a bug, not bad input."""
