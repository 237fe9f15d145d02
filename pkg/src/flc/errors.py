"""Exceptions shared across the solver and the diagnostics."""

from __future__ import annotations

import numpy as np


class NonPositiveFieldError(ValueError):
    """A field that must be strictly positive has a cell <= 0."""

    def __init__(self, what: str, index: int, value: float):
        super().__init__(f"{what}: nonpositive value {value!r} at cell {index}")
        self.index = index
        self.value = value


class NegativeFieldError(ValueError):
    """A bound was requested for a field with negative cells, where it does not apply."""

    def __init__(self, what: str, index: int, value: float):
        super().__init__(f"{what}: negative value {value!r} at cell {index}; bounds need u >= 0")
        self.index = index
        self.value = value


def require_positive(u: np.ndarray, what: str = "u") -> None:
    bad = np.flatnonzero(~(u > 0))
    if bad.size:
        i = int(bad[0])
        raise NonPositiveFieldError(what, i, float(u[i]))


def require_nonnegative(u: np.ndarray, what: str = "u") -> None:
    bad = np.flatnonzero(~(u >= 0))
    if bad.size:
        i = int(bad[0])
        raise NegativeFieldError(what, i, float(u[i]))
