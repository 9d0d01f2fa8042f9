"""Experiment configuration: YAML parsing, validation and lossless serialisation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from .exceptions import InvalidArgumentError
from .noise import AR1, PRESET_NAMES, Constant, DiurnalShift, LinearRamp, StepChange, preset
from .drift import Schedule
from .seeding import digest
from .sweep import DEFAULT_ALPHA, SWEEP_AXES, Axis, ConfigPoint, SweepScenario, make_observable

DEFAULT_SEED = 2024

_PROFILES = {cls.kind: cls for cls in (Constant, StepChange, LinearRamp, DiurnalShift, AR1)}


class ConfigError(InvalidArgumentError):
    """Invalid experiment configuration."""


def _take(section: dict, key: str, default: Any = dataclasses.MISSING, where: str = "") -> Any:
    if key in section:
        return section.pop(key)
    if default is dataclasses.MISSING:
        raise ConfigError(f"{where or 'config'}: missing required key {key!r}")
    return default


def _no_extra(section: dict, where: str) -> None:
    if section:
        raise ConfigError(f"{where}: unknown keys {sorted(section)}")


def _section(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(value).__name__}")
    return dict(value)


def profile_from_dict(data: Any):
    data = _section(data, "drift.profile")
    kind = _take(data, "kind", where="drift.profile")
    if kind not in _PROFILES:
        raise ConfigError(f"drift.profile: unknown kind {kind!r}; valid kinds: {', '.join(_PROFILES)}")
    try:
        return _PROFILES[kind](**data)
    except TypeError as exc:
        raise ConfigError(f"drift.profile ({kind}): {exc}") from None


def profile_to_dict(profile) -> dict:
    return {"kind": profile.kind, **dataclasses.asdict(profile)}


@dataclass(frozen=True)
class DriftSpec:
    schedule: Schedule
    n_reps: int
    point: ConfigPoint
    profile: Any

    def noise(self):
        return preset(self.point.noise, self.profile)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    master_seed: int = DEFAULT_SEED
    alpha: float = DEFAULT_ALPHA
    output_dir: str = "out"
    sweep: Optional[SweepScenario] = None
    drift: Optional[DriftSpec] = None

    @property
    def digest(self) -> str:
        return digest(self.to_dict())

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return dataclasses.replace(self, master_seed=int(seed))

    # -- parsing --

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        data = _section(data, "config")
        try:
            scenario = str(_take(data, "scenario"))
            seed = int(_take(data, "master_seed", DEFAULT_SEED))
            alpha = float(_take(data, "alpha", DEFAULT_ALPHA))
            output_dir = str(_take(data, "output_dir", "out"))
            circuit = _section(_take(data, "circuit", {}), "circuit")
            n_qubits = int(_take(circuit, "n_qubits", 4))
            observable = str(_take(circuit, "observable", "magnetisation"))
            _no_extra(circuit, "circuit")
            make_observable(observable, n_qubits)
            sweep = _take(data, "sweep", None)
            drift = _take(data, "drift", None)
            _no_extra(data, "config")
            if not 0 < alpha < 1:
                raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
            sweep = None if sweep is None else _sweep_from_dict(sweep, n_qubits, observable, alpha)
            drift = None if drift is None else _drift_from_dict(drift, n_qubits, observable)
        except ConfigError:
            raise
        except (InvalidArgumentError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
        if sweep is None and drift is None:
            raise ConfigError("config needs a 'sweep' or a 'drift' section")
        return cls(scenario, seed, alpha, output_dir, sweep, drift)

    def to_dict(self) -> dict:
        ref = self.sweep if self.sweep is not None else self.drift.point
        out: dict = {
            "scenario": self.scenario,
            "master_seed": self.master_seed,
            "alpha": self.alpha,
            "output_dir": self.output_dir,
            "circuit": {"n_qubits": ref.n_qubits, "observable": ref.observable},
        }
        if self.sweep is not None:
            s = self.sweep
            out["sweep"] = {
                "noise_presets": list(s.noise_presets),
                "trotter_depths": list(s.depths),
                "correction_family": s.correction_family,
                "axes": [_axis_to_dict(a) for a in s.axes],
            }
        if self.drift is not None:
            d = self.drift
            p = d.point
            out["drift"] = {
                "session": d.schedule.session,
                "interval_h": d.schedule.interval,
                "duration_h": d.schedule.duration,
                "n_reps": d.n_reps,
                "trotter_depth": p.depth,
                "noise_preset": p.noise,
                "profile": profile_to_dict(d.profile),
                "zne": {
                    "n_shots": p.n_shots,
                    "folding": p.folding,
                    "extrapolation": p.extrapolation,
                    "scale_factors": list(p.scale_factors),
                },
            }
        return out

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)


def _plain(value: Any) -> Any:
    return list(value) if isinstance(value, tuple) else value


def _axis_to_dict(axis: Axis) -> dict:
    return {
        "name": axis.name,
        "default": _plain(axis.default),
        "alternatives": [_plain(a) for a in axis.alternatives],
        "documented": axis.documented,
    }


def _sweep_from_dict(data: Any, n_qubits: int, observable: str, alpha: float) -> SweepScenario:
    data = _section(data, "sweep")
    presets = tuple(str(p) for p in _take(data, "noise_presets", where="sweep"))
    for p in presets:
        if p not in PRESET_NAMES:
            raise ConfigError(f"sweep.noise_presets: unknown preset {p!r}; valid presets: {', '.join(PRESET_NAMES)}")
    depths = tuple(int(d) for d in _take(data, "trotter_depths", where="sweep"))
    if not presets or not depths:
        raise ConfigError("sweep: noise_presets and trotter_depths must be nonempty")
    family = str(_take(data, "correction_family", "all"))
    raw_axes = _take(data, "axes", where="sweep")
    _no_extra(data, "sweep")
    axes = []
    for i, entry in enumerate(raw_axes):
        entry = _section(entry, f"sweep.axes[{i}]")
        name = _take(entry, "name", where=f"sweep.axes[{i}]")
        if name not in SWEEP_AXES:
            raise ConfigError(f"sweep.axes[{i}]: unknown axis {name!r}; valid axes: {', '.join(SWEEP_AXES)}")
        default = _take(entry, "default", where=f"sweep.axes[{i}]")
        alts = tuple(_take(entry, "alternatives", ()) or ())
        documented = bool(_take(entry, "documented", False))
        _no_extra(entry, f"sweep.axes[{i}]")
        axes.append(Axis(name, default, alts, documented))
    names = {a.name for a in axes}
    if names != set(SWEEP_AXES):
        raise ConfigError(f"sweep.axes must define each of {', '.join(SWEEP_AXES)} exactly once")
    scenario = SweepScenario(presets, depths, tuple(axes), n_qubits, observable, alpha, family)
    if family not in ("all", "per-noise"):
        raise ConfigError(f"sweep.correction_family must be 'all' or 'per-noise', got {family!r}")
    for p in scenario.points()[:1]:
        p.zne_config()
    return scenario


def _drift_from_dict(data: Any, n_qubits: int, observable: str) -> DriftSpec:
    data = _section(data, "drift")
    schedule = Schedule(
        float(_take(data, "interval_h", where="drift")),
        float(_take(data, "duration_h", where="drift")),
        str(_take(data, "session", "session")),
    )
    n_reps = int(_take(data, "n_reps", 30))
    if n_reps < 2:
        raise ConfigError(f"drift.n_reps must be >= 2, got {n_reps}")
    depth = int(_take(data, "trotter_depth", 1))
    noise = str(_take(data, "noise_preset", where="drift"))
    if noise not in PRESET_NAMES:
        raise ConfigError(f"drift.noise_preset: unknown preset {noise!r}; valid presets: {', '.join(PRESET_NAMES)}")
    profile = profile_from_dict(_take(data, "profile", {"kind": "constant"}))
    zne = _section(_take(data, "zne", {}), "drift.zne")
    point = ConfigPoint(
        noise=noise,
        depth=depth,
        n_shots=int(_take(zne, "n_shots", 4096)),
        n_reps=n_reps,
        folding=_take(zne, "folding", "local_left"),
        extrapolation=_take(zne, "extrapolation", "richardson"),
        scale_factors=tuple(_take(zne, "scale_factors", (1.0, 3.0, 5.0))),
        n_qubits=n_qubits,
        observable=observable,
    )
    _no_extra(zne, "drift.zne")
    _no_extra(data, "drift")
    point.zne_config()
    return DriftSpec(schedule, n_reps, point, profile)


def shipped_scenarios() -> list[str]:
    files = resources.files("znelab") / "scenarios"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".yaml"))


def load_config(source: str | Path) -> ExperimentConfig:
    """Parse a YAML file, or a shipped scenario given by name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif str(source) in shipped_scenarios():
        text = (resources.files("znelab") / "scenarios" / f"{source}.yaml").read_text(encoding="utf-8")
    else:
        raise ConfigError(f"no config file {str(source)!r} and no shipped scenario of that name "
                          f"(shipped: {', '.join(shipped_scenarios())})")
    return parse_config(text)


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from None
    return ExperimentConfig.from_dict(data)
