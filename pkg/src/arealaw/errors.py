"""Exception types raised across the package."""

from __future__ import annotations


class ArealawError(Exception):
    """Base class for all package errors."""


class ZeroModeError(ArealawError, ValueError):
    """The k=0 mode of a massless chain has vanishing frequency."""


class NotPositiveDefiniteError(ArealawError, ValueError):
    """Cholesky factorization broke down.

    ``pivot`` is the zero-based index of the first non-positive pivot.
    """

    def __init__(self, pivot: int, size: int):
        super().__init__(
            f"matrix of size {size} is not positive definite (pivot {pivot} failed)"
        )
        self.pivot = pivot
        self.size = size


class IllConditionedError(ArealawError, ValueError):
    """Cholesky pivots span more than the allowed dynamic range."""

    def __init__(self, ratio: float, limit: float):
        super().__init__(f"Cholesky pivot ratio {ratio:.3e} exceeds {limit:.1e}")
        self.ratio = ratio
        self.limit = limit


class InconsistencyError(ArealawError, RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


class ConvergenceError(ArealawError, RuntimeError):
    """A quadrature estimate did not settle under refinement."""


class FitError(ArealawError, ValueError):
    """A least-squares problem is underdetermined or ill-posed."""
