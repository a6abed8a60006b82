"""Error types shared across the package.

The CLI maps these onto exit codes: ``DataError`` -> 2, ``NumericError`` -> 3.
"""


class DataError(ValueError):
    """Malformed, degenerate or out-of-range input data."""


class DimensionError(DataError):
    """Array length does not match what a layer or network expects."""

    def __init__(self, what: str, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected length {expected}, got {actual}")


class NumericError(ArithmeticError):
    """A loss, gradient or parameter became NaN/Inf."""
