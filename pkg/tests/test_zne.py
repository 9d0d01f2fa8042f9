import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from oracles import lagrange_at_zero
from znelab.exceptions import InvalidArgumentError
from znelab.noise import preset
from znelab.sim import Observable, build_qtc, exact_expectation, simulate
from znelab.sim.circuits import circuit_from_gates
from znelab.zne import (
    ExponentialExtrapolator,
    FoldingStrategy,
    LinearExtrapolator,
    PolynomialExtrapolator,
    RichardsonExtrapolator,
    ZneConfig,
    extrapolate,
    fold,
    fold_counts,
    richardson_coefficients,
    run_zne,
    variance_amplification_bound,
)
from znelab.zne.coefficients import variance_factor
from znelab.zne.extrapolation import ExtrapolationMethod, ExtrapolationWarning

STRATEGIES = list(FoldingStrategy)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_unit_scale_is_identity(strategy):
    c = build_qtc(4, 1)
    assert fold(c, 1.0, strategy).gates == c.gates


def test_global_triple_fold():
    c = build_qtc(4, 1)
    folded = fold(c, 3.0, FoldingStrategy.GLOBAL)
    d = len(c)
    assert len(folded) == 3 * d
    assert folded.gates[:d] == c.gates
    assert folded.gates[d : 2 * d] == c.inverse().gates


def test_local_left_partial_fold():
    c = circuit_from_gates(2, [("rx", (0,), 0.1), ("rz", (1,), 0.2), ("h", (0,)), ("cz", (0, 1))])
    folded = fold(c, 2.0, FoldingStrategy.LOCAL_LEFT)
    g = c.gates
    assert len(folded) == 8
    assert folded.gates == (g[0], g[0].adjoint(), g[0], g[1], g[1].adjoint(), g[1], g[2], g[3])


def test_local_right_and_global_selection():
    c = circuit_from_gates(1, [("rx", (0,), 0.1 * (i + 1)) for i in range(6)])
    right = fold(c, 5.0 / 3.0, FoldingStrategy.LOCAL_RIGHT)  # s = 2
    assert right.gates[-3:] == (c.gates[5], c.gates[5].adjoint(), c.gates[5])
    assert right.gates[:4] == c.gates[:4]
    glob = fold(c, 5.0 / 3.0, FoldingStrategy.GLOBAL)
    # stride 3: gates 0 and 3 carry the extra folds
    assert glob.gates[:3] == (c.gates[0], c.gates[0].adjoint(), c.gates[0])
    assert glob.gates[5:8] == (c.gates[3], c.gates[3].adjoint(), c.gates[3])


def test_fold_rejects_small_scale():
    with pytest.raises(InvalidArgumentError):
        fold(build_qtc(2, 1), 0.9)


def test_fold_rounding_is_half_even():
    assert fold_counts(5, 2.0) == (0, 2)  # 2.5 -> 2
    assert fold_counts(3, 2.0) == (0, 2)  # 1.5 -> 2
    assert fold_counts(4, 7.0) == (3, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.floats(1.0, 9.0), st.sampled_from(STRATEGIES))
def test_gate_count_law(d, lam, strategy):
    c = circuit_from_gates(1, [("rx", (0,), 0.01 * (i + 1)) for i in range(d)])
    n, s = fold_counts(d, lam)
    assert len(fold(c, lam, strategy)) == d + 2 * (n * d + s)


@pytest.mark.parametrize("lam", [1, 1.5, 2, 3, 5])
@pytest.mark.parametrize("strategy", STRATEGIES)
def test_folding_preserves_ideal_expectation(lam, strategy):
    c = build_qtc(4, 2)
    obs = Observable.magnetisation(4)
    assert exact_expectation(fold(c, lam, strategy), obs) == pytest.approx(exact_expectation(c, obs), abs=1e-9)


def test_coefficient_examples():
    assert np.allclose(richardson_coefficients([1, 3, 5]), [1.875, -1.25, 0.375], atol=0, rtol=1e-15)
    assert np.allclose(richardson_coefficients([1, 2]), [2, -1])
    with pytest.raises(InvalidArgumentError):
        richardson_coefficients([1, 1, 3])
    with pytest.raises(InvalidArgumentError):
        richardson_coefficients([1])


def test_variance_bound_values():
    assert variance_amplification_bound([1, 3, 5]) == pytest.approx(3.5, abs=1e-12)
    big = variance_amplification_bound([1, 1.1, 1.25, 1.5])
    assert big == pytest.approx(681, rel=1e-6)
    assert big / 3.5 == pytest.approx(194.57, abs=0.01)
    assert variance_factor([1, 3, 5]) == pytest.approx(5.21875, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1.0, 10.0), min_size=2, max_size=5, unique=True))
def test_coefficients_match_rational_oracle(factors):
    rounded = sorted({round(f, 3) for f in factors})
    if len(rounded) < 2 or min(np.diff(rounded)) < 0.05:
        return
    c = richardson_coefficients(rounded)
    ref = [float(x) for x in lagrange_at_zero(rounded)]
    assert np.allclose(c, ref, rtol=1e-9, atol=1e-9)
    assert math.fsum(c) == pytest.approx(1.0, abs=1e-8)


def test_coefficients_sum_to_one_on_random_sets():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        k = rng.integers(2, 6)
        factors = 1 + np.sort(rng.choice(np.arange(0, 80) / 10, size=k, replace=False))
        assert math.fsum(richardson_coefficients(factors)) == pytest.approx(1.0, abs=1e-9)


def test_extrapolate_examples():
    quad = extrapolate([(1, 0.9, 0), (3, 0.1, 0), (5, -1.5, 0)], "richardson")
    assert quad.value == pytest.approx(1.0, abs=1e-12)
    assert extrapolate([(1, 0.9, 0), (3, 0.7, 0)], "linear").value == pytest.approx(1.0, abs=1e-12)
    expo = extrapolate([(1, math.exp(-0.5), 0), (3, math.exp(-1.5), 0)], "exponential")
    assert expo.value == pytest.approx(1.0, abs=1e-12) and not expo.fallback


def test_richardson_variance_formula():
    sigma = np.array([0.01, 0.02, 0.03])
    res = extrapolate(list(zip([1, 3, 5], [0.9, 0.6, 0.4], sigma)), "richardson")
    c = richardson_coefficients([1, 3, 5])
    assert res.variance == pytest.approx(float(np.sum(c**2 * sigma**2)), rel=1e-14)
    eq = extrapolate([(1, 0.9, 0.1), (3, 0.6, 0.1), (5, 0.4, 0.1)], "richardson")
    assert eq.variance == pytest.approx(5.21875 * 0.01, rel=1e-14)


def test_exponential_fallback_on_mixed_signs():
    res = extrapolate([(1, 0.2, 0.01), (3, -0.1, 0.01), (5, 0.05, 0.01)], "exponential")
    assert res.fallback
    lin = extrapolate([(1, 0.2, 0.01), (3, -0.1, 0.01), (5, 0.05, 0.01)], "linear")
    assert res.value == lin.value
    with pytest.warns(ExtrapolationWarning):
        ExponentialExtrapolator().fit([1, 3], [0.0, 0.5])


def test_extrapolate_rejects_too_few_points():
    with pytest.raises(InvalidArgumentError):
        extrapolate([(1, 0.9, 0.0)], "linear")
    with pytest.raises(InvalidArgumentError):
        extrapolate([(1, 0.9, 0.0), (3, 0.7, 0.0)], "polynomial:2")


def test_method_parsing_round_trips():
    for text in ("linear", "exponential", "richardson", "polynomial:2"):
        assert str(ExtrapolationMethod.parse(text)) == text
    with pytest.raises(InvalidArgumentError):
        ExtrapolationMethod.parse("spline")
    with pytest.raises(InvalidArgumentError):
        ExtrapolationMethod.parse("linear:2")


def test_estimators_follow_sklearn_conventions():
    est = PolynomialExtrapolator(degree=2)
    assert est.get_params() == {"degree": 2}
    copy = clone(est).set_params(degree=1)
    assert copy.degree == 1 and est.degree == 2
    lam = np.array([1.0, 2.0, 3.0, 4.0])
    y = 1 - 0.1 * lam + 0.01 * lam**2
    fitted = est.fit(lam.reshape(-1, 1), y)
    assert fitted is est
    assert est.predict([[0.0]])[0] == pytest.approx(1.0, abs=1e-12)
    assert est.score(lam.reshape(-1, 1), y) == pytest.approx(1.0)
    rich = RichardsonExtrapolator().fit(lam, y)
    assert np.allclose(rich.predict(lam), y)
    assert LinearExtrapolator().get_params() == {}
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        RichardsonExtrapolator().predict([0.0])


def test_richardson_independent_of_input_order():
    a = extrapolate([(1, 0.9, 0.01), (3, 0.7, 0.02), (5, 0.55, 0.03)])
    b = extrapolate([(5, 0.55, 0.03), (1, 0.9, 0.01), (3, 0.7, 0.02)])
    assert a.value == pytest.approx(b.value, abs=1e-15)
    assert a.variance == pytest.approx(b.variance, abs=1e-18)


def test_polynomial_weights_are_the_fit_functional():
    lam = np.array([1.0, 1.5, 2.0, 2.5, 3.0])
    rng = np.random.default_rng(0)
    y = rng.normal(size=5)
    est = PolynomialExtrapolator(degree=2).fit(lam, y)
    ref = np.polyfit(lam, y, 2)[-1]
    assert est.zero_noise_value_ == pytest.approx(ref, abs=1e-12)
    assert est.weights_ @ y == pytest.approx(ref, abs=1e-12)


def test_run_zne_ideal_noise_recovers_ideal():
    c, obs = build_qtc(4, 1), Observable.magnetisation(4)
    e = exact_expectation(c, obs)
    est = run_zne(c, obs, preset("ideal"), ZneConfig(), 0.0, np.random.default_rng(1))
    assert abs(est.raw_value - e) < 0.05 and abs(est.mitigated_value - e) < 0.2
    exact = run_zne(c, obs, preset("ideal"), ZneConfig(), exact=True)
    assert exact.mitigated_value == pytest.approx(e, abs=1e-12)


def test_run_zne_noise_floor_points_near_zero():
    c, obs = build_qtc(4, 3), Observable.z(0)
    est = run_zne(c, obs, preset("noise-floor"), ZneConfig(), 0.0, np.random.default_rng(2))
    for p in est.per_lambda:
        assert abs(p.value) < 4 / math.sqrt(4096)


@pytest.mark.parametrize("steps", [1, 3, 5])
@pytest.mark.parametrize("method", ["richardson", "linear", "exponential"])
def test_run_zne_exact_improves_on_depolarising(steps, method):
    c, obs = build_qtc(4, steps), Observable.magnetisation(4)
    e = exact_expectation(c, obs)
    est = run_zne(c, obs, preset("kyoto-depolarising"), ZneConfig(method=method), exact=True)
    assert abs(est.mitigated_value - e) < abs(est.raw_value - e)


def test_run_zne_needs_rng_unless_exact():
    with pytest.raises(InvalidArgumentError):
        run_zne(build_qtc(2, 1), Observable.z(0), preset("ideal"), ZneConfig())


def test_zne_config_validates():
    with pytest.raises(InvalidArgumentError):
        ZneConfig(method="polynomial:3")
    with pytest.raises(InvalidArgumentError):
        ZneConfig(n_shots=0)
