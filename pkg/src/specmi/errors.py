"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class NumericFailure(ArithmeticError):
    """Raised when a computation produces non-finite or singular values."""
