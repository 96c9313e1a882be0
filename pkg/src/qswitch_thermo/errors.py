"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a documented precondition (shape, domain, tolerance)."""


class NumericalError(ArithmeticError):
    """A numerical routine failed or an internal consistency check did not hold."""
