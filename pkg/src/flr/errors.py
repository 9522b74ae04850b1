"""Exception types shared across the package."""


class FlrError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FlrError, ValueError):
    """Bad input: wrong shape, non-finite values, out-of-range parameter."""


class ParseError(ValidationError):
    """Malformed input file; carries the offending row when known."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NumericError(FlrError, RuntimeError):
    """A numerical kernel (SVD, linear solve) failed."""


class DivergenceError(NumericError):
    """Solver iterates left the finite range."""

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)
        self.iteration = iteration
