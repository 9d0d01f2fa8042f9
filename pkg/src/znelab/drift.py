"""Longitudinal harness: identical ZNE experiments repeated over simulated
wall-clock time, and the apparent-effectiveness spread that drift induces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .exceptions import DegenerateSampleError, InvalidArgumentError
from .noise import TimedNoiseModel
from .seeding import derive_rng
from .sim.circuits import build_qtc
from .sim.simulator import exact_expectation
from .stats import (
    PairedSample,
    TimeSeries,
    cohens_d,
    eta_squared,
    icc_oneway,
    kish_neff,
    lag1_autocorr,
    mean_confidence_interval,
    paired_t_test,
)
from .sweep import DEFAULT_ALPHA, ConfigPoint, OutcomeClass, _classify_p, classify

SIGN_CROSSING = "sign-crossing"


@dataclass(frozen=True)
class Schedule:
    interval: float
    duration: float
    session: str = "session"

    def __post_init__(self):
        if not self.interval > 0:
            raise InvalidArgumentError(f"interval must be > 0, got {self.interval}")
        if not self.duration >= self.interval:
            raise InvalidArgumentError(f"duration must be >= interval, got {self.duration}")

    @property
    def n_points(self) -> int:
        return int(math.floor(self.duration / self.interval + 1e-9)) + 1

    def times(self) -> tuple[float, ...]:
        return tuple(i * self.interval for i in range(self.n_points))


@dataclass(frozen=True, eq=False)
class TimePoint:
    time: float
    raw: np.ndarray
    mitigated: np.ndarray
    paired: PairedSample
    cohens_d: Optional[float]
    p_value: Optional[float]

    @property
    def cls(self) -> OutcomeClass:
        if self.p_value is None or self.cohens_d is None:
            return OutcomeClass.DEGENERATE
        return _classify_p(self.p_value, self.cohens_d, DEFAULT_ALPHA)


@dataclass(frozen=True, eq=False)
class LongitudinalResult:
    points: tuple[TimePoint, ...]
    schedule: Schedule
    config_digest: str
    seed: int
    e_ideal: float

    @property
    def n_reps(self) -> int:
        return self.points[0].raw.size

    def raw_series(self) -> TimeSeries:
        return TimeSeries(tuple(p.time for p in self.points), tuple(p.raw for p in self.points))

    def d_values(self) -> list[Optional[float]]:
        return [p.cohens_d for p in self.points]


def run_time_point(
    config: ConfigPoint, noise: TimedNoiseModel, time: float, index: int, n_reps: int, master_seed: int
) -> TimePoint:
    """One scheduled time point; a pure function of its arguments."""
    circuit = build_qtc(config.n_qubits, config.depth)
    observable = config.build_observable()
    e_ideal = exact_expectation(circuit, observable)
    zne_config = config.zne_config()
    # local import keeps the sweep -> zne -> noise import chain one-directional
    from .zne import run_zne

    raw = np.empty(n_reps)
    mit = np.empty(n_reps)
    for r in range(n_reps):
        est = run_zne(circuit, observable, noise, zne_config, time, derive_rng(master_seed, "drift", index, r))
        raw[r] = est.raw_value
        mit[r] = est.mitigated_value
    paired = PairedSample.from_errors(raw - e_ideal, mit - e_ideal)
    try:
        t_result = paired_t_test(paired)
        d, p = cohens_d(paired), t_result.p_value
    except DegenerateSampleError:
        d, p = None, None
    raw.setflags(write=False)
    mit.setflags(write=False)
    return TimePoint(time, raw, mit, paired, d, p)


def run_longitudinal(
    config: ConfigPoint,
    noise: TimedNoiseModel,
    schedule: Schedule,
    n_reps: int = 30,
    master_seed: int = 0,
) -> LongitudinalResult:
    """``n_reps`` ZNE runs at every scheduled time, with the noise evaluated at
    that time.  Repetition ``r`` of time point ``i`` is seeded from
    ``derive_seed(master_seed, "drift", i, r)``."""
    if n_reps < 2:
        raise InvalidArgumentError(f"n_reps must be >= 2, got {n_reps}")
    points = tuple(
        run_time_point(config, noise, t, i, n_reps, master_seed) for i, t in enumerate(schedule.times())
    )
    e_ideal = exact_expectation(build_qtc(config.n_qubits, config.depth), config.build_observable())
    return LongitudinalResult(points, schedule, config.digest, master_seed, e_ideal)


@dataclass(frozen=True)
class DriftSeverity:
    eta_squared: float
    r1: float
    icc: float
    n_eff: float
    d_range: tuple[float, float]


def severity(result: LongitudinalResult) -> DriftSeverity:
    if len(result.points) < 3:
        raise InvalidArgumentError("severity needs at least 3 time points")
    series = result.raw_series()
    eta = eta_squared(series)
    r1 = lag1_autocorr(series.means())
    icc = icc_oneway(series)
    ds = [d for d in result.d_values() if d is not None]
    if not ds:
        raise DegenerateSampleError("no time point has a defined Cohen's d")
    return DriftSeverity(eta, r1, icc, kish_neff(result.n_reps, icc), (min(ds), max(ds)))


def effective_df(n_eff: float) -> int:
    return max(1, int(round(n_eff)) - 1)


def effective_p_value(d: float, n_eff: float) -> float:
    """Two-sided p for effect ``d`` as if only ``n_eff`` replicates were independent."""
    t = d * math.sqrt(n_eff)
    return float(2.0 * special.stdtr(effective_df(n_eff), -abs(t)))


@dataclass(frozen=True)
class IllusionReport:
    severity: DriftSeverity
    d_min: float
    d_max: float
    illusion_ratio: Optional[float]
    sign_crossing: bool
    classes: tuple[OutcomeClass, ...]
    effective_classes: tuple[OutcomeClass, ...]
    straddles_boundary: bool

    @property
    def ratio_label(self) -> str:
        return SIGN_CROSSING if self.sign_crossing else f"{self.illusion_ratio:.12g}"


def illusion_report(result: LongitudinalResult, alpha: float = DEFAULT_ALPHA) -> IllusionReport:
    """Extremal per-time-point d and their ratio.

    Both positive gives ``d_max / d_min``; both negative gives the magnitude
    ratio ``d_min / d_max``; a sign change gives no ratio.
    """
    ds = result.d_values()
    if any(d is None for d in ds):
        raise InvalidArgumentError("every time point needs a defined Cohen's d")
    sev = severity(result)
    d_min, d_max = min(ds), max(ds)
    if d_min > 0:
        ratio, crossing = d_max / d_min, False
    elif d_max < 0:
        ratio, crossing = d_min / d_max, False
    else:
        ratio, crossing = None, True
    classes = tuple(classify(_t(p), p.cohens_d, alpha) for p in result.points)
    effective = tuple(_classify_p(effective_p_value(d, sev.n_eff), d, alpha) for d in ds)
    sig_min = effective_p_value(d_min, sev.n_eff) < alpha
    sig_max = effective_p_value(d_max, sev.n_eff) < alpha
    return IllusionReport(sev, d_min, d_max, ratio, crossing, classes, effective, sig_min != sig_max)


def _t(point: TimePoint):
    return None if point.p_value is None else paired_t_test(point.paired)
