"""Exception types shared across the package.

The CLI maps these onto exit codes (input problems -> 2, positivity
failures -> 3); the HTTP service maps them onto status codes (400 / 409).
"""


class InputError(ValueError):
    """Malformed or mathematically inadmissible input."""


class DimensionMismatch(InputError):
    """Operands live over spaces of different dimension."""


class PositivityError(ArithmeticError):
    """A matrix or functional that must be positive semidefinite is not.

    Carries the offending minimal eigenvalue so callers can report it.
    """

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
