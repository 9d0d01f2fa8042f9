"""Single-repetition ZNE kernel: fold, simulate, sample, extrapolate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .._validation import check_positive_int
from ..exceptions import InvalidArgumentError
from ..noise import TimedNoiseModel
from ..sim.circuits import Circuit, Observable
from ..sim.simulator import exact_term_expectations
from ..sim.states import ShotEstimate, sample_from_expectations
from .coefficients import ScaleFactorSet
from .extrapolation import ExtrapolationMethod, extrapolate
from .folding import FoldingStrategy, fold


@dataclass(frozen=True)
class ZneConfig:
    strategy: FoldingStrategy = FoldingStrategy.LOCAL_LEFT
    method: ExtrapolationMethod = field(default_factory=lambda: ExtrapolationMethod("richardson"))
    scale_factors: ScaleFactorSet = field(default_factory=lambda: ScaleFactorSet((1.0, 3.0, 5.0)))
    n_shots: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "strategy", FoldingStrategy(self.strategy))
        object.__setattr__(self, "method", ExtrapolationMethod.parse(self.method))
        if not isinstance(self.scale_factors, ScaleFactorSet):
            object.__setattr__(self, "scale_factors", ScaleFactorSet(tuple(self.scale_factors)))
        check_positive_int(self.n_shots, "n_shots")
        if self.method.kind == "polynomial" and self.method.degree > len(self.scale_factors) - 1:
            raise InvalidArgumentError(
                f"polynomial degree {self.method.degree} exceeds K-1 = {len(self.scale_factors) - 1}"
            )


@dataclass(frozen=True)
class ZneEstimate:
    mitigated_value: float
    raw_value: float
    per_lambda: tuple[ShotEstimate, ...]
    variance_estimate: float
    fallback: bool = False


def run_zne(
    circuit: Circuit,
    observable: Observable,
    noise: TimedNoiseModel,
    config: ZneConfig,
    time: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    exact: bool = False,
) -> ZneEstimate:
    """One ZNE repetition at wall-clock ``time``.

    With ``exact=True`` the per-lambda values are the exact density-matrix
    expectations (zero shot noise, zero std_error) and ``rng`` is unused.
    """
    if rng is None and not exact:
        raise InvalidArgumentError("run_zne needs an explicit random generator unless exact=True")
    weights = [w for _, w in observable.terms]
    per_lambda = []
    for lam in config.scale_factors:
        folded = fold(circuit, lam, config.strategy)
        terms = exact_term_expectations(folded, observable, noise, float(time))
        if exact:
            per_lambda.append(ShotEstimate(float(np.dot(weights, terms)), 0.0, config.n_shots))
        else:
            per_lambda.append(sample_from_expectations(terms, weights, config.n_shots, rng))
    points = [(lam, est.value, est.std_error) for lam, est in zip(config.scale_factors, per_lambda)]
    result = extrapolate(points, config.method)
    return ZneEstimate(
        mitigated_value=result.value,
        raw_value=per_lambda[0].value,
        per_lambda=tuple(per_lambda),
        variance_estimate=max(0.0, result.variance) if math.isfinite(result.variance) else math.inf,
        fallback=result.fallback,
    )
