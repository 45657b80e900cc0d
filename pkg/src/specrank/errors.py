"""Exception types shared across the package."""


class SpecrankError(Exception):
    """Base class for all errors raised by specrank."""


class DimensionMismatch(SpecrankError):
    """Operator applied to a vector of the wrong length."""

    def __init__(self, expected, actual):
        super().__init__(f"dimension mismatch: expected length {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class InvalidWindow(SpecrankError):
    """Spectral window with lambda_max <= lambda_min."""


class InvalidInterval(SpecrankError):
    """Integration interval with a >= b or outside the admissible range."""


class InvalidConfig(SpecrankError):
    """Bad configuration value (e.g. zero probe vectors)."""


class KrylovError(SpecrankError):
    """Lanczos failure: too many steps requested, or early breakdown with no fallback."""


class ConvergenceError(SpecrankError):
    """Iterative eigensolver exceeded its rotation budget."""


class MomentBlowupError(SpecrankError):
    """Chebyshev recurrence diverged; the spectrum escaped [-1, 1].

    Usually cured by a larger safety margin on the spectral window.
    """


class NoGapError(SpecrankError):
    """Threshold selection found no detectable gap in the density curve.

    Carries the derivative diagnostics so the curve can be inspected.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class OracleCapError(SpecrankError):
    """Dense oracle refused an input above its size cap; use the estimators."""


class OracleVerificationError(SpecrankError):
    """Residual check of the dense eigensolver failed."""


class MatrixMarketError(SpecrankError):
    """Matrix Market parse failure, annotated with the offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
