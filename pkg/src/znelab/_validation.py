"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .exceptions import InvalidArgumentError


def check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_finite_1d(values: Iterable[float], name: str, min_length: int = 1) -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be one-dimensional")
    if arr.size < min_length:
        raise InvalidArgumentError(f"{name} needs at least {min_length} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains non-finite values")
    return arr


def check_p_values(p_values: Sequence[float]) -> np.ndarray:
    arr = check_finite_1d(p_values, "p_values", min_length=0)
    if np.any((arr < 0) | (arr > 1)):
        raise InvalidArgumentError("p-values must lie in [0, 1]")
    return arr


def check_scale_factors(factors: Sequence[float]) -> tuple[float, ...]:
    """Validate a scale-factor list: K >= 2, each >= 1, pairwise distinct.

    The factors are returned sorted; duplicates raise rather than being
    silently merged.
    """
    arr = check_finite_1d(factors, "scale factors", min_length=2)
    if np.any(arr < 1.0):
        raise InvalidArgumentError(f"scale factors must be >= 1, got {arr.tolist()}")
    if np.unique(arr).size != arr.size:
        raise InvalidArgumentError(f"scale factors must be pairwise distinct, got {arr.tolist()}")
    return tuple(float(x) for x in np.sort(arr))


def check_scale_data(X, y=None):
    """Coerce ``X`` (scale factors, shape (K,) or (K, 1)) and ``y`` to 1-D arrays."""
    lam = np.asarray(X, dtype=float)
    if lam.ndim == 2:
        if lam.shape[1] != 1:
            raise InvalidArgumentError(f"X must have a single column of scale factors, got shape {lam.shape}")
        lam = lam[:, 0]
    lam = check_finite_1d(lam, "scale factors")
    if y is None:
        return lam
    values = check_finite_1d(y, "expectation values")
    if values.size != lam.size:
        raise InvalidArgumentError(f"X and y lengths differ: {lam.size} != {values.size}")
    return lam, values
