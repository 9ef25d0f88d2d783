"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class DomainError(ValidationError):
    """Raised for non-finite inputs or points outside an operation's domain."""
