"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
NumericError -> 3.
"""


class FairsparseError(Exception):
    """Base class for all package errors."""


class ConfigError(FairsparseError):
    """Invalid configuration or argument values."""


class DimensionError(ConfigError):
    """Inputs with inconsistent or unsupported shapes."""


class DataError(FairsparseError):
    """Malformed or unreadable input data."""


class NumericError(FairsparseError):
    """Numerical failure inside an algorithm."""


class SingularMatrixError(NumericError):
    """Cholesky factorization hit a non-positive pivot."""

    def __init__(self, pivot_index: int, pivot_value: float):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot_index} "
            f"has value {pivot_value:.6g}"
        )


class ConvergenceError(NumericError):
    """An iterative method ran out of iterations."""

    def __init__(self, message: str, last_objective: float | None = None):
        self.last_objective = last_objective
        super().__init__(message)
