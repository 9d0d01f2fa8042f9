"""Richardson coefficients and the variance-amplification bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .._validation import check_scale_factors


@dataclass(frozen=True)
class ScaleFactorSet:
    factors: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", check_scale_factors(self.factors))

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)


def _as_set(s) -> ScaleFactorSet:
    return s if isinstance(s, ScaleFactorSet) else ScaleFactorSet(tuple(s))


def richardson_coefficients(s: ScaleFactorSet | Sequence[float]) -> np.ndarray:
    """Lagrange basis polynomials evaluated at zero noise.

    ``c_k = prod_{j != k} lambda_j / (lambda_j - lambda_k)``; the coefficients
    sum to one because interpolation reproduces constants.
    """
    lam = np.asarray(_as_set(s).factors)
    c = np.ones_like(lam)
    for k in range(lam.size):
        for j in range(lam.size):
            if j != k:
                c[k] *= lam[j] / (lam[j] - lam[k])
    return c


def variance_amplification_bound(s: ScaleFactorSet | Sequence[float]) -> float:
    """``sum |c_k|``, computable before running any circuit."""
    return float(np.sum(np.abs(richardson_coefficients(s))))


def variance_factor(s: ScaleFactorSet | Sequence[float]) -> float:
    """``sum c_k^2``: variance inflation for equal per-point variances."""
    return float(np.sum(richardson_coefficients(s) ** 2))
