"""Exception types shared across the library.

The CLI maps ``ValidationError`` to exit code 1 and ``NumericError`` to
exit code 2; both carry the name of the subsystem that raised them so
error text can be prefixed consistently.
"""


class SpecbandError(Exception):
    """Base class for all specband errors."""

    def __init__(self, message, module=None):
        super().__init__(message)
        self.module = module


class ValidationError(SpecbandError, ValueError):
    """Bad inputs: violated preconditions, malformed files, invalid flags."""


class NumericError(SpecbandError, ArithmeticError):
    """Numerically degenerate state: zero spectra, failed inversions, etc."""
