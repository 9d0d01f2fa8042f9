"""One-at-a-time reproduction sweep over the ZNE parameter space.

Stages: a parameter space with documented and undocumented defaults,
one-at-a-time sampling around the defaults, repeated execution with the full
statistics battery, and classification of each swept axis as active or inert.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .exceptions import DegenerateSampleError, InvalidArgumentError
from .noise import TimedNoiseModel, preset
from .seeding import derive_rng, digest
from .sim.circuits import Observable, build_qtc
from .sim.simulator import exact_expectation
from .stats import (
    EffectSizes,
    PairedSample,
    TestResult,
    benjamini_hochberg,
    bonferroni,
    cliffs_delta,
    cohens_d,
    paired_t_test,
    wilcoxon_signed_rank,
)
from .zne import ExtrapolationMethod, FoldingStrategy, ZneConfig, run_zne

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.05

GRID_AXES = ("noise", "depth")
SWEEP_AXES = ("n_shots", "n_reps", "folding", "extrapolation", "scale_factors")
AXES = GRID_AXES + SWEEP_AXES


class OutcomeClass(str, Enum):
    SIGNIFICANTLY_BETTER = "significantly_better"
    NOT_SIGNIFICANT = "not_significant"
    SIGNIFICANTLY_WORSE = "significantly_worse"
    DEGENERATE = "degenerate"


class Provenance(str, Enum):
    DOCUMENTED = "documented"
    UNDOCUMENTED_DEFAULT = "undocumented-default"
    SWEPT_ALTERNATIVE = "swept-alternative"


def _normalise(axis: str, value: Any) -> Any:
    if axis == "scale_factors":
        return tuple(float(x) for x in value)
    if axis == "folding":
        return FoldingStrategy(value).value
    if axis == "extrapolation":
        return str(ExtrapolationMethod.parse(value))
    if axis in ("n_shots", "n_reps", "depth"):
        return int(value)
    return value


@dataclass(frozen=True)
class Axis:
    name: str
    default: Any
    alternatives: tuple = ()
    documented: bool = False

    def __post_init__(self):
        if self.name not in AXES:
            raise InvalidArgumentError(f"unknown axis {self.name!r}; axes are {AXES}")
        default = _normalise(self.name, self.default)
        alts = tuple(_normalise(self.name, a) for a in self.alternatives)
        if default in alts:
            raise InvalidArgumentError(f"axis {self.name}: alternatives must exclude the default")
        if len(set(alts)) != len(alts):
            raise InvalidArgumentError(f"axis {self.name}: duplicate alternatives")
        object.__setattr__(self, "default", default)
        object.__setattr__(self, "alternatives", alts)


@dataclass(frozen=True)
class ParameterSpace:
    axes: tuple[Axis, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise InvalidArgumentError("each axis may appear only once")
        missing = set(AXES) - set(names)
        if missing:
            raise InvalidArgumentError(f"parameter space lacks axes {sorted(missing)}")

    def axis(self, name: str) -> Axis:
        for a in self.axes:
            if a.name == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True)
class ConfigPoint:
    noise: str
    depth: int
    n_shots: int = 4096
    n_reps: int = 200
    folding: str = FoldingStrategy.LOCAL_LEFT.value
    extrapolation: str = "richardson"
    scale_factors: tuple[float, ...] = (1.0, 3.0, 5.0)
    n_qubits: int = 4
    observable: str = "magnetisation"
    axis: Optional[str] = None
    provenance: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        for name in AXES:
            object.__setattr__(self, name, _normalise(name, getattr(self, name)))

    @property
    def is_baseline(self) -> bool:
        return self.axis is None

    @property
    def variant(self) -> str:
        if self.axis is None:
            return "default"
        value = getattr(self, self.axis)
        if isinstance(value, tuple):
            return "{" + ",".join(f"{v:g}" for v in value) + "}"
        return str(value)

    def values(self) -> dict:
        """Axis values only; the digest (and therefore every seed) ignores
        labels, so a configuration reproduces regardless of how it was reached."""
        out = {name: getattr(self, name) for name in AXES}
        out["scale_factors"] = list(self.scale_factors)
        out["n_qubits"] = self.n_qubits
        out["observable"] = self.observable
        return out

    @property
    def digest(self) -> str:
        return digest(self.values())

    def zne_config(self) -> ZneConfig:
        return ZneConfig(
            strategy=FoldingStrategy(self.folding),
            method=ExtrapolationMethod.parse(self.extrapolation),
            scale_factors=self.scale_factors,
            n_shots=self.n_shots,
        )

    def build_observable(self) -> Observable:
        return make_observable(self.observable, self.n_qubits)


def make_observable(name: str, n_qubits: int) -> Observable:
    if name == "magnetisation":
        return Observable.magnetisation(n_qubits)
    if name.startswith("z") and name[1:].isdigit():
        return Observable.z(int(name[1:]))
    raise InvalidArgumentError(f"unknown observable {name!r}; use 'magnetisation' or 'z<k>'")


def enumerate_oat(space: ParameterSpace, n_qubits: int = 4, observable: str = "magnetisation") -> list[ConfigPoint]:
    """Baseline first, then one configuration per (axis, alternative) in declaration order."""
    defaults = {a.name: a.default for a in space.axes}
    base_prov = tuple(
        (a.name, (Provenance.DOCUMENTED if a.documented else Provenance.UNDOCUMENTED_DEFAULT).value)
        for a in space.axes
    )
    points = [ConfigPoint(**defaults, n_qubits=n_qubits, observable=observable, provenance=base_prov)]
    for a in space.axes:
        for alt in a.alternatives:
            prov = tuple((n, Provenance.SWEPT_ALTERNATIVE.value if n == a.name else p) for n, p in base_prov)
            values = dict(defaults, **{a.name: alt})
            points.append(
                ConfigPoint(**values, n_qubits=n_qubits, observable=observable, axis=a.name, provenance=prov)
            )
    return points


@dataclass(frozen=True)
class ConfigResult:
    config: ConfigPoint
    paired: PairedSample
    mean_raw_error: float
    mean_mitigated_error: float
    t_result: Optional[TestResult]
    wilcoxon_result: Optional[TestResult]
    effects: Optional[EffectSizes]
    n_fallback: int = 0
    diagnostics: str = ""
    p_bonferroni: Optional[float] = None
    p_bh: Optional[float] = None
    class_raw: Optional[OutcomeClass] = None
    class_bonferroni: Optional[OutcomeClass] = None
    class_bh: Optional[OutcomeClass] = None

    def __post_init__(self):
        # unset classes follow from the result's own (p, d) at the default level
        if self.class_raw is None:
            object.__setattr__(self, "class_raw", classify(self.t_result, self.cohens_d))
        for name in ("class_bonferroni", "class_bh"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, self.class_raw)

    @property
    def degenerate(self) -> bool:
        return self.t_result is None

    @property
    def cohens_d(self) -> Optional[float]:
        return None if self.effects is None else self.effects.cohens_d

    def class_for(self, regime: str) -> OutcomeClass:
        return {"raw": self.class_raw, "bonferroni": self.class_bonferroni, "bh": self.class_bh}[regime]


def classify(t_result: Optional[TestResult], d: Optional[float], alpha: float = DEFAULT_ALPHA) -> OutcomeClass:
    """Significantly better (p < alpha, d > 0), worse (p < alpha, d < 0), else not significant."""
    if t_result is None or d is None or not math.isfinite(d):
        return OutcomeClass.DEGENERATE
    return _classify_p(t_result.p_value, d, alpha)


def _classify_p(p: float, d: float, alpha: float) -> OutcomeClass:
    if p < alpha and d > 0:
        return OutcomeClass.SIGNIFICANTLY_BETTER
    if p < alpha and d < 0:
        return OutcomeClass.SIGNIFICANTLY_WORSE
    return OutcomeClass.NOT_SIGNIFICANT


def battery(paired: PairedSample) -> tuple[Optional[TestResult], Optional[TestResult], Optional[EffectSizes], str]:
    """t-test, Wilcoxon and effect sizes; degenerate parts come back as None."""
    notes = []
    try:
        t_result = paired_t_test(paired)
        effects = EffectSizes(cohens_d(paired), cliffs_delta(paired))
    except DegenerateSampleError as exc:
        t_result, effects = None, None
        notes.append(f"t-test: {exc}")
    try:
        w_result = wilcoxon_signed_rank(paired)
    except DegenerateSampleError as exc:
        w_result = None
        notes.append(f"wilcoxon: {exc}")
    return t_result, w_result, effects, "; ".join(notes)


def resolve_noise(name: str) -> TimedNoiseModel:
    return preset(name)


def run_config(
    config: ConfigPoint,
    n_reps: Optional[int] = None,
    master_seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    noise: Optional[TimedNoiseModel] = None,
    time: float = 0.0,
) -> ConfigResult:
    """Run ``n_reps`` independent ZNE repetitions and the statistics battery.

    Repetition ``i`` draws from a generator seeded by
    ``derive_seed(master_seed, config.digest, i)``.
    """
    n_reps = config.n_reps if n_reps is None else int(n_reps)
    if n_reps < 2:
        raise InvalidArgumentError(f"n_reps must be >= 2, got {n_reps}")
    circuit = build_qtc(config.n_qubits, config.depth)
    observable = config.build_observable()
    model = noise if noise is not None else resolve_noise(config.noise)
    zne_config = config.zne_config()
    e_ideal = exact_expectation(circuit, observable)
    raw_err = np.empty(n_reps)
    mit_err = np.empty(n_reps)
    n_fallback = 0
    cfg_digest = config.digest
    for i in range(n_reps):
        rng = derive_rng(master_seed, cfg_digest, i)
        est = run_zne(circuit, observable, model, zne_config, time, rng)
        raw_err[i] = est.raw_value - e_ideal
        mit_err[i] = est.mitigated_value - e_ideal
        n_fallback += est.fallback
    paired = PairedSample.from_errors(raw_err, mit_err)
    t_result, w_result, effects, notes = battery(paired)
    if n_fallback:
        notes = "; ".join(filter(None, [notes, f"exponential fit fell back to linear in {n_fallback}/{n_reps} reps"]))
    cls = classify(t_result, None if effects is None else effects.cohens_d, alpha)
    return ConfigResult(
        config=config,
        paired=paired,
        mean_raw_error=float(np.mean(np.abs(raw_err))),
        mean_mitigated_error=float(np.mean(np.abs(mit_err))),
        t_result=t_result,
        wilcoxon_result=w_result,
        effects=effects,
        n_fallback=n_fallback,
        diagnostics=notes,
        class_raw=cls,
        class_bonferroni=cls,
        class_bh=cls,
    )


REGIMES = ("raw", "bonferroni", "bh")


def _counts(results: Sequence[ConfigResult], regime: str) -> dict:
    counts = {c.value: 0 for c in OutcomeClass}
    for r in results:
        counts[r.class_for(regime).value] += 1
    return counts


def apply_corrections(
    results: Sequence[ConfigResult], alpha: float = DEFAULT_ALPHA, family: str = "all"
) -> tuple[list[ConfigResult], dict]:
    """Adjust t-test p-values jointly across the family and re-classify.

    ``family="all"`` corrects over every non-degenerate result;
    ``family="per-noise"`` corrects within each noise preset.  Degenerate
    results carry no p-value and stay outside the family.
    """
    if not results:
        raise InvalidArgumentError("no results to correct")
    if family not in ("all", "per-noise"):
        raise InvalidArgumentError(f"family must be 'all' or 'per-noise', got {family!r}")
    results = list(results)
    groups: dict[str, list[int]] = {}
    for i, r in enumerate(results):
        if r.degenerate:
            continue
        key = "all" if family == "all" else r.config.noise
        groups.setdefault(key, []).append(i)
    out = list(results)
    for idx in groups.values():
        p = np.array([results[i].t_result.p_value for i in idx])
        p_bonf = bonferroni(p)
        p_bh = benjamini_hochberg(p)
        for j, i in enumerate(idx):
            r = results[i]
            d = r.effects.cohens_d
            out[i] = replace(
                r,
                p_bonferroni=float(p_bonf[j]),
                p_bh=float(p_bh[j]),
                class_raw=_classify_p(r.t_result.p_value, d, alpha),
                class_bonferroni=_classify_p(float(p_bonf[j]), d, alpha),
                class_bh=_classify_p(float(p_bh[j]), d, alpha),
            )
    summary = {regime: _counts(out, regime) for regime in REGIMES}
    summary["family"] = family
    summary["family_size"] = sum(len(v) for v in groups.values())
    summary["flips_raw_to_bonferroni"] = sum(r.class_raw != r.class_bonferroni for r in out)
    summary["flips_raw_to_bh"] = sum(r.class_raw != r.class_bh for r in out)
    summary["wilcoxon_agreement"] = _wilcoxon_agreement(out, alpha)
    return out, summary


def _wilcoxon_agreement(results: Sequence[ConfigResult], alpha: float) -> int:
    agree = 0
    for r in results:
        if r.wilcoxon_result is None or r.effects is None:
            continue
        w_class = _classify_p(r.wilcoxon_result.p_value, r.effects.cohens_d, alpha)
        agree += w_class == r.class_raw
    return agree


def activity_report(results: Sequence[ConfigResult], regime: str = "raw") -> dict:
    """Per-axis active/inert verdicts against each grid cell's baseline.

    An axis is active if any of its variants lands in a different outcome
    class than the baseline of the same (noise, depth) cell.
    """
    if regime not in REGIMES:
        raise InvalidArgumentError(f"regime must be one of {REGIMES}")
    cells: dict[tuple, dict] = {}
    for r in results:
        key = (r.config.noise, r.config.depth)
        cell = cells.setdefault(key, {"baseline": None, "variants": []})
        if r.config.is_baseline:
            cell["baseline"] = r
        else:
            cell["variants"].append(r)
    axes: list[str] = []
    for r in results:
        if r.config.axis is not None and r.config.axis not in axes:
            axes.append(r.config.axis)
    transitions = []
    per_cell = []
    active = {a: False for a in axes}
    for (noise, depth), cell in cells.items():
        base = cell["baseline"]
        if base is None:
            raise InvalidArgumentError(f"no baseline for noise={noise!r}, depth={depth}")
        base_cls = base.class_for(regime)
        cell_active = {a: False for a in axes}
        for v in cell["variants"]:
            cls = v.class_for(regime)
            if cls != base_cls:
                cell_active[v.config.axis] = True
                active[v.config.axis] = True
                transitions.append(
                    {
                        "noise": noise,
                        "depth": depth,
                        "axis": v.config.axis,
                        "variant": v.config.variant,
                        "from": base_cls.value,
                        "to": cls.value,
                    }
                )
        per_cell.append(
            {
                "noise": noise,
                "depth": depth,
                "baseline": base_cls.value,
                "axes": {a: ("active" if f else "inert") for a, f in cell_active.items()},
            }
        )
    matrix: dict[str, dict[str, int]] = {}
    for t in transitions:
        row = matrix.setdefault(t["from"], {})
        row[t["to"]] = row.get(t["to"], 0) + 1
    return {
        "regime": regime,
        "axes": {a: ("active" if f else "inert") for a, f in active.items()},
        "cells": per_cell,
        "transitions": transitions,
        "transition_matrix": matrix,
    }


@dataclass(frozen=True)
class SweepScenario:
    noise_presets: tuple[str, ...]
    depths: tuple[int, ...]
    axes: tuple[Axis, ...]
    n_qubits: int = 4
    observable: str = "magnetisation"
    alpha: float = DEFAULT_ALPHA
    correction_family: str = "all"

    def points(self) -> list[ConfigPoint]:
        out = []
        for noise in self.noise_presets:
            for depth in self.depths:
                space = ParameterSpace(
                    (Axis("noise", noise, documented=True), Axis("depth", depth, documented=True)) + tuple(self.axes)
                )
                out.extend(enumerate_oat(space, self.n_qubits, self.observable))
        return out


def _run_one(args) -> ConfigResult:
    config, master_seed, alpha = args
    return run_config(config, master_seed=master_seed, alpha=alpha)


def run_sweep(scenario: SweepScenario, master_seed: int = 0, parallelism: int = 1) -> tuple[list[ConfigResult], dict]:
    """Execute every configuration and apply multiplicity corrections.

    Output order follows :meth:`SweepScenario.points` whatever the degree of
    parallelism.
    """
    points = scenario.points()
    jobs = [(p, master_seed, scenario.alpha) for p in points]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = []
        for k, job in enumerate(jobs):
            logger.info("config %d/%d: %s %s=%s", k + 1, len(jobs), job[0].noise, job[0].axis, job[0].variant)
            results.append(_run_one(job))
    return apply_corrections(results, scenario.alpha, scenario.correction_family)
