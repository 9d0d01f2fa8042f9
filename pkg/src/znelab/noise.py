"""Time-varying noise models: base noise specs modulated by drift profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from ._validation import check_probability
from .exceptions import InvalidArgumentError
from .sim.circuits import Gate
from .sim.states import DensityState, bit_flip, depolarize

ONE_QUBIT = "one-qubit"
TWO_QUBIT = "two-qubit"
GATE_CLASSES = (ONE_QUBIT, TWO_QUBIT)

# one-qubit error taken as a tenth of the two-qubit median when only the latter is known
ONE_TO_TWO_QUBIT_RATIO = 0.1

KYOTO_TWO_QUBIT_ERROR = 0.00947
MARRAKESH_TWO_QUBIT_ERROR = 0.00241
NOISE_FLOOR_TWO_QUBIT_ERROR = 0.99
OSAKA_MEDIAN_TWO_QUBIT_ERROR = 0.009
OSAKA_SNAPSHOT_SEED = 20240126


# -- base noise specs ---------------------------------------------------------


@dataclass(frozen=True)
class Ideal:
    kind = "ideal"

    def base_rate(self, gate_class: str, support: tuple[int, ...] = ()) -> float:
        return 0.0


@dataclass(frozen=True)
class GlobalDepolarising:
    p1: float
    p2: float
    kind = "global_depolarising"

    def __post_init__(self):
        check_probability(self.p1, "p1")
        check_probability(self.p2, "p2")

    def base_rate(self, gate_class: str, support: tuple[int, ...] = ()) -> float:
        return self.p2 if gate_class == TWO_QUBIT else self.p1


@dataclass(frozen=True)
class NoiseFloor:
    """Two-qubit gates that all but fully depolarise their support."""

    p2: float = NOISE_FLOOR_TWO_QUBIT_ERROR
    p1: float = KYOTO_TWO_QUBIT_ERROR * ONE_TO_TWO_QUBIT_RATIO
    kind = "noise_floor"

    def __post_init__(self):
        check_probability(self.p1, "p1")
        check_probability(self.p2, "p2")

    def base_rate(self, gate_class: str, support: tuple[int, ...] = ()) -> float:
        return self.p2 if gate_class == TWO_QUBIT else self.p1


@dataclass(frozen=True)
class Snapshot:
    """Per-support error rates, as read from a calibration snapshot.

    ``rates`` maps a sorted qubit support to its gate error; supports that are
    missing fall back to ``default_p1`` / ``default_p2``.  ``readout`` holds
    per-qubit measurement flip probabilities.
    """

    rates: tuple[tuple[tuple[int, ...], float], ...]
    default_p1: float
    default_p2: float
    readout: tuple[float, ...] = ()
    kind = "snapshot"

    def __post_init__(self):
        rates = tuple(sorted((tuple(sorted(s)), check_probability(p, "rate")) for s, p in self.rates))
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "readout", tuple(check_probability(r, "readout") for r in self.readout))
        check_probability(self.default_p1, "default_p1")
        check_probability(self.default_p2, "default_p2")

    def base_rate(self, gate_class: str, support: tuple[int, ...] = ()) -> float:
        key = tuple(sorted(support))
        for s, p in self.rates:
            if s == key:
                return p
        return self.default_p2 if gate_class == TWO_QUBIT else self.default_p1


NoiseSpec = Union[Ideal, GlobalDepolarising, NoiseFloor, Snapshot]


# -- drift profiles -----------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    kind = "constant"

    def offset(self, time: float) -> float:
        return 0.0


@dataclass(frozen=True)
class StepChange:
    t0: float
    delta: float
    kind = "step_change"

    def offset(self, time: float) -> float:
        return self.delta if time >= self.t0 else 0.0


@dataclass(frozen=True)
class LinearRamp:
    slope: float
    kind = "linear_ramp"

    def offset(self, time: float) -> float:
        return self.slope * time


@dataclass(frozen=True)
class DiurnalShift:
    """Offset applied while the hour of day lies in ``[night_start, night_end)``.

    Windows wrap around midnight when ``night_start > night_end``.
    ``start_hour`` is the hour of day at ``time == 0``.
    """

    night_start: float
    night_end: float
    delta: float
    start_hour: float = 0.0
    kind = "diurnal_shift"

    def offset(self, time: float) -> float:
        hour = (self.start_hour + time) % 24.0
        if self.night_start <= self.night_end:
            inside = self.night_start <= hour < self.night_end
        else:
            inside = hour >= self.night_start or hour < self.night_end
        return self.delta if inside else 0.0


@dataclass(frozen=True)
class AR1:
    """Autoregressive offset sampled on a fixed time grid of spacing ``interval``."""

    rho: float
    sigma: float
    seed: int
    interval: float = 0.5
    kind = "ar1"

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise InvalidArgumentError(f"AR1 requires |rho| < 1, got {self.rho}")
        if self.interval <= 0:
            raise InvalidArgumentError("AR1 interval must be positive")

    def offset(self, time: float) -> float:
        index = int(math.floor(time / self.interval + 1e-9))
        return float(_ar1_path(self.rho, self.sigma, self.seed, index + 1)[index])


@lru_cache(maxsize=256)
def _ar1_path(rho: float, sigma: float, seed: int, length: int) -> np.ndarray:
    # the generator's prefix property makes the value at an index independent of length
    shocks = np.random.default_rng(seed).standard_normal(length)
    path = np.empty(length)
    path[0] = sigma / math.sqrt(1.0 - rho * rho) * shocks[0]
    for i in range(1, length):
        path[i] = rho * path[i - 1] + sigma * shocks[i]
    path.setflags(write=False)
    return path


DriftProfile = Union[Constant, StepChange, LinearRamp, DiurnalShift, AR1]


@dataclass(frozen=True)
class TimedNoiseModel:
    base: NoiseSpec = field(default_factory=Ideal)
    drift: DriftProfile = field(default_factory=Constant)
    name: str = ""

    @property
    def is_ideal(self) -> bool:
        return isinstance(self.base, Ideal)


def error_rate_at(
    model: TimedNoiseModel, gate_class: str, time: float, support: tuple[int, ...] = ()
) -> float:
    """Gate error probability at wall-clock ``time`` (hours), clamped to [0, 1].

    The drift offset is added to two-qubit rates as is and to one-qubit rates
    scaled by ``ONE_TO_TWO_QUBIT_RATIO``.  The ideal model never drifts.
    """
    if gate_class not in GATE_CLASSES:
        raise InvalidArgumentError(f"gate_class must be one of {GATE_CLASSES}, got {gate_class!r}")
    if time < 0:
        raise InvalidArgumentError(f"time must be >= 0, got {time}")
    if model.is_ideal:
        return 0.0
    offset = model.drift.offset(time)
    if gate_class == ONE_QUBIT:
        offset *= ONE_TO_TWO_QUBIT_RATIO
    return min(1.0, max(0.0, model.base.base_rate(gate_class, support) + offset))


def apply_noise(state: DensityState, gate: Gate, model: TimedNoiseModel, time: float) -> DensityState:
    """Apply the depolarising channel the model assigns to ``gate`` at ``time``."""
    p = error_rate_at(model, gate.gate_class, time, gate.targets)
    if p == 0.0:
        return state
    return DensityState(depolarize(state.matrix, gate.targets, p, state.n_qubits), state.n_qubits)


def apply_readout(state: DensityState, model: TimedNoiseModel) -> DensityState:
    """Measurement bit flips, expressed as a classical flip channel before readout."""
    readout = getattr(model.base, "readout", ())
    rho = state.matrix
    for q, r in enumerate(readout[: state.n_qubits]):
        rho = bit_flip(rho, q, r, state.n_qubits)
    return DensityState(rho, state.n_qubits)


# -- presets ------------------------------------------------------------------


def _osaka_snapshot(n_qubits: int = 8) -> Snapshot:
    rng = np.random.default_rng(OSAKA_SNAPSHOT_SEED)
    two = OSAKA_MEDIAN_TWO_QUBIT_ERROR * rng.lognormal(0.0, 0.35, size=n_qubits - 1)
    one = OSAKA_MEDIAN_TWO_QUBIT_ERROR * ONE_TO_TWO_QUBIT_RATIO * rng.lognormal(0.0, 0.35, size=n_qubits)
    rates = tuple(((q, q + 1), round(float(p), 6)) for q, p in enumerate(two))
    rates += tuple(((q,), round(float(p), 6)) for q, p in enumerate(one))
    return Snapshot(
        rates=rates,
        default_p1=OSAKA_MEDIAN_TWO_QUBIT_ERROR * ONE_TO_TWO_QUBIT_RATIO,
        default_p2=OSAKA_MEDIAN_TWO_QUBIT_ERROR,
    )


def _depolarising(p2: float) -> GlobalDepolarising:
    return GlobalDepolarising(p1=p2 * ONE_TO_TWO_QUBIT_RATIO, p2=p2)


_PRESETS = {
    "ideal": lambda: Ideal(),
    "kyoto-depolarising": lambda: _depolarising(KYOTO_TWO_QUBIT_ERROR),
    "marrakesh-depolarising": lambda: _depolarising(MARRAKESH_TWO_QUBIT_ERROR),
    "noise-floor": lambda: NoiseFloor(),
    "osaka-snapshot-like": _osaka_snapshot,
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, drift: Optional[DriftProfile] = None) -> TimedNoiseModel:
    """Named noise model with a constant drift profile unless ``drift`` is given."""
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown noise preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        ) from None
    return TimedNoiseModel(base=factory(), drift=drift if drift is not None else Constant(), name=name)
