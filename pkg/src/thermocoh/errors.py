"""Exception types shared across the package."""


class ThermocohError(Exception):
    """Base class for all package errors."""


class InputError(ThermocohError, ValueError):
    """Malformed input: wrong dimensions, non-Hermitian matrices, bad parameters."""


class NumericError(ThermocohError, ArithmeticError):
    """A numerical routine failed to converge or violated an internal certificate."""
