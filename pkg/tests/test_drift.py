import numpy as np
import pytest
from scipy.stats import beta

from znelab.drift import (
    LongitudinalResult,
    Schedule,
    TimePoint,
    effective_p_value,
    illusion_report,
    run_longitudinal,
    run_time_point,
    severity,
)
from znelab.exceptions import InvalidArgumentError
from znelab.noise import StepChange, preset
from znelab.stats import PairedSample, TimeSeries, cohens_d, eta_squared, paired_t_test
from znelab.sweep import ConfigPoint, OutcomeClass

CFG = ConfigPoint(noise="kyoto-depolarising", depth=1)
SHORT = Schedule(0.5, 6.0, "short")


def test_schedule_counts():
    assert Schedule(0.5, 12).n_points == 25
    assert Schedule(0.5, 48).n_points == 97
    assert Schedule(0.3, 0.9).times() == pytest.approx((0.0, 0.3, 0.6, 0.9))
    with pytest.raises(InvalidArgumentError):
        Schedule(0, 1)
    with pytest.raises(InvalidArgumentError):
        Schedule(2, 1)


def test_time_point_reruns_bit_exactly():
    noise = preset("kyoto-depolarising", StepChange(2.0, 0.004))
    result = run_longitudinal(CFG, noise, SHORT, 4, master_seed=9)
    alone = run_time_point(CFG, noise, SHORT.times()[5], 5, 4, master_seed=9)
    assert np.array_equal(alone.raw, result.points[5].raw)
    assert np.array_equal(alone.mitigated, result.points[5].mitigated)
    assert {p.raw.size for p in result.points} == {4}
    with pytest.raises(InvalidArgumentError):
        run_longitudinal(CFG, noise, SHORT, 1)


def test_step_change_shifts_raw_mean():
    noise = preset("kyoto-depolarising", StepChange(3.0, 0.01))
    result = run_longitudinal(CFG, noise, SHORT, 10, master_seed=1)
    before = np.mean([p.raw.mean() for p in result.points if p.time < 3.0])
    after = np.mean([p.raw.mean() for p in result.points if p.time >= 3.0])
    se = max(p.raw.std(ddof=1) for p in result.points) / np.sqrt(10)
    assert before - after > 6 * se


def test_constant_noise_has_small_severity():
    result = run_longitudinal(CFG, preset("kyoto-depolarising"), SHORT, 10, master_seed=2)
    sev = severity(result)
    g, n = len(result.points), 10 * len(result.points)
    # under exchangeable groups eta^2 ~ Beta((g - 1) / 2, (n - g) / 2)
    assert sev.eta_squared < beta.ppf(0.999, (g - 1) / 2, (n - g) / 2)
    assert abs(sev.r1) < 0.5
    ds = result.d_values()
    assert sev.d_range == (min(ds), max(ds))
    assert sev.d_range[0] in ds and sev.d_range[1] in ds


def test_step_size_raises_eta_squared_on_paired_seeds():
    for seed in (1, 2):
        etas = [
            severity(run_longitudinal(CFG, preset("kyoto-depolarising", StepChange(3.0, delta)), SHORT, 8, seed)).eta_squared
            for delta in (0.0, 0.001, 0.003)
        ]
        assert etas[0] < etas[1] < etas[2]


def test_exchangeability_under_constant_noise():
    passes = 0
    for seed in range(20):
        result = run_longitudinal(CFG, preset("kyoto-depolarising"), Schedule(1.0, 6.0), 8, seed)
        series = result.raw_series()
        observed = eta_squared(series)
        values = np.concatenate(series.groups)
        rng = np.random.default_rng(seed)
        null = []
        for _ in range(200):
            perm = rng.permutation(values).reshape(len(series.groups), -1)
            null.append(eta_squared(TimeSeries(series.times, tuple(perm))))
        passes += np.mean(np.array(null) >= observed) > 0.01
    assert passes >= 19


def _point(t, deltas):
    sample = PairedSample(np.asarray(deltas, dtype=float))
    raw = np.asarray(deltas, dtype=float) + 0.3 + 0.01 * t
    return TimePoint(t, raw, raw - sample.deltas, sample, cohens_d(sample), paired_t_test(sample).p_value)


def test_identical_time_points_give_ratio_one():
    pts = tuple(_point(t, [0.1, 0.2, 0.3, 0.25]) for t in range(5))
    result = LongitudinalResult(pts, Schedule(1, 4), "x", 0, 1.0)
    rep = illusion_report(result)
    assert rep.illusion_ratio == 1.0 and not rep.sign_crossing
    assert rep.ratio_label == "1"


def test_sign_crossing_marker():
    pts = (_point(0, [0.1, 0.2, 0.3]), _point(1, [-0.1, -0.2, -0.3]), _point(2, [0.1, 0.3, 0.2]))
    rep = illusion_report(LongitudinalResult(pts, Schedule(1, 2), "x", 0, 1.0))
    assert rep.sign_crossing and rep.illusion_ratio is None
    assert rep.ratio_label == "sign-crossing"
    assert OutcomeClass.NOT_SIGNIFICANT in rep.classes


def test_undefined_d_is_rejected():
    flat = PairedSample(np.array([0.2, 0.2, 0.2]))
    bad = TimePoint(1, np.ones(3), np.ones(3), flat, None, None)
    pts = (_point(0, [0.1, 0.2, 0.3]), bad, _point(2, [0.1, 0.3, 0.2]))
    with pytest.raises(InvalidArgumentError):
        illusion_report(LongitudinalResult(pts, Schedule(1, 2), "x", 0, 1.0))


def test_effective_sample_size_flips_moderate_effect():
    nominal = effective_p_value(0.7, 30)
    assert nominal < 0.05
    assert paired_t_test(np.random.default_rng(0).standard_normal(30)).df == 29
    assert effective_p_value(0.7, 3.0) > 0.05
    # df floor of one for n_eff close to one
    assert effective_p_value(0.7, 1.2) == pytest.approx(effective_p_value(0.7, 1.2))
