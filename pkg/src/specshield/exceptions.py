"""Exception types shared across the toolkit."""


class NumericalError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge."""


class DegenerateMatrixError(ValueError):
    """Raised when an operation requires a nonzero spectrum and gets none."""


class UndefinedMetricError(ValueError):
    """Raised when a similarity metric has no defined value (zero operand)."""


class NotFittedError(ValueError):
    """Raised when an estimator is used before ``fit`` was called."""


class MatrixFileError(ValueError):
    """Raised when a matrix file is malformed or truncated."""
