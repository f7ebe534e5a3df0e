"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, ``DataError``
(and plain ``ValueError``) exits 2, ``NumericError`` exits 3.
"""


class DataError(ValueError):
    """Input data violates a documented format or value contract."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values and cannot continue."""
