"""Exception types shared across the package."""


class LejaExpError(Exception):
    """Base class for all package errors."""


class ParameterError(LejaExpError, ValueError):
    """Invalid argument (wrong size, out of range, malformed input)."""


class NumericError(LejaExpError, ArithmeticError):
    """A computation produced nonfinite values or lost feasibility."""


class IntervalTooLargeError(NumericError):
    """The backward-error equation has no positive root for this interval."""


class TableError(LejaExpError):
    """A required parameter table is missing or malformed."""


class MatrixMarketError(ParameterError):
    """Matrix Market parse failure; carries the offending line number."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
