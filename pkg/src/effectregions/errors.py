"""Exception hierarchy shared across the package."""

from __future__ import annotations

import numpy as np


class EffectRegionsError(Exception):
    """Base class for all errors raised by this package."""


class DatasetError(EffectRegionsError):
    pass


class ParseError(DatasetError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyDatasetError(DatasetError):
    pass


class FormulaError(EffectRegionsError):
    pass


class FitError(EffectRegionsError):
    pass


class SingularDesignError(FitError):
    pass


class SeparationError(FitError):
    pass


class NonConvergenceError(FitError):
    def __init__(self, message: str, last_iterate: np.ndarray):
        super().__init__(message)
        self.last_iterate = last_iterate


class NotPositiveDefiniteError(EffectRegionsError):
    def __init__(self, pivot: int):
        # 1-based, matching how the failing leading minor is usually quoted
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (pivot {pivot})")


class DomainError(EffectRegionsError, ValueError):
    pass


class DegenerateRegionError(EffectRegionsError):
    pass


class OracleUnusableError(EffectRegionsError):
    pass
