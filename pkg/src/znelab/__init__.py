"""Statistical reproduction lab for zero-noise extrapolation experiments."""

__version__ = "0.1.0"

from .exceptions import DegenerateSampleError, InvalidArgumentError
from .noise import PRESET_NAMES, TimedNoiseModel, error_rate_at, preset
from .sim import Circuit, Observable, build_qtc, exact_expectation, simulate
from .zne import (
    ExponentialExtrapolator,
    FoldingStrategy,
    LinearExtrapolator,
    PolynomialExtrapolator,
    RichardsonExtrapolator,
    ZneConfig,
    fold,
    richardson_coefficients,
    run_zne,
    variance_amplification_bound,
)
