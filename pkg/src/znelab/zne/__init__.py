"""Digital zero-noise extrapolation."""

from .coefficients import (
    ScaleFactorSet,
    richardson_coefficients,
    variance_amplification_bound,
    variance_factor,
)
from .extrapolation import (
    EXPONENTIAL,
    LINEAR,
    RICHARDSON,
    ExponentialExtrapolator,
    ExtrapolationMethod,
    ExtrapolationResult,
    ExtrapolationWarning,
    LinearExtrapolator,
    PolynomialExtrapolator,
    RichardsonExtrapolator,
    extrapolate,
)
from .folding import FoldingStrategy, fold, fold_counts
from .runner import ZneConfig, ZneEstimate, run_zne

__all__ = [
    "EXPONENTIAL",
    "LINEAR",
    "RICHARDSON",
    "ExponentialExtrapolator",
    "ExtrapolationMethod",
    "ExtrapolationResult",
    "ExtrapolationWarning",
    "FoldingStrategy",
    "LinearExtrapolator",
    "PolynomialExtrapolator",
    "RichardsonExtrapolator",
    "ScaleFactorSet",
    "ZneConfig",
    "ZneEstimate",
    "extrapolate",
    "fold",
    "fold_counts",
    "richardson_coefficients",
    "run_zne",
    "variance_amplification_bound",
    "variance_factor",
]
