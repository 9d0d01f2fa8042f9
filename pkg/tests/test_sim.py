import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import simulate_dense, z_string_expectation
from znelab.exceptions import InvalidArgumentError
from znelab.noise import GlobalDepolarising, TimedNoiseModel, preset
from znelab.sim import (
    Circuit,
    DensityState,
    Observable,
    build_qtc,
    exact_expectation,
    expectation,
    sample_shots,
    simulate,
)
from znelab.sim.circuits import Gate, GateKind, circuit_from_gates


def depol(p1, p2):
    return TimedNoiseModel(GlobalDepolarising(p1, p2))


@pytest.mark.parametrize("steps, expected", [(1, 6), (3, 18), (5, 30)])
def test_qtc_two_qubit_ladder(steps, expected):
    assert build_qtc(4, steps).two_qubit_gate_count == expected


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("steps", range(1, 7))
def test_qtc_gate_count_law(n, steps):
    c = build_qtc(n, steps)
    assert c.two_qubit_gate_count == 2 * (n - 1) * steps
    assert len(c) == steps * (n + 7 * (n - 1))


@pytest.mark.parametrize("args", [(0, 1), (4, 0), (9, 1)])
def test_qtc_rejects_bad_sizes(args):
    with pytest.raises(InvalidArgumentError):
        build_qtc(*args)


def test_empty_circuit_gives_zero_state():
    rho = simulate(Circuit(3)).matrix
    expected = np.zeros((8, 8))
    expected[0, 0] = 1
    assert np.allclose(rho, expected)


def test_pi_x_rotation_flips_z():
    c = circuit_from_gates(1, [("rx", (0,), math.pi)])
    assert exact_expectation(c, Observable.z(0)) == pytest.approx(-1.0, abs=1e-12)


def test_single_gate_depolarising_shrinks_z():
    c = circuit_from_gates(2, [("rx", (0,), 0.7)])
    ideal = exact_expectation(c, Observable.z(0))
    noisy = exact_expectation(c, Observable.z(0), depol(0.2, 0.0))
    assert noisy == pytest.approx(0.8 * ideal, abs=1e-12)


def test_expectation_examples():
    assert expectation(DensityState.zero(3), Observable.z(0)) == 1.0
    mixed = DensityState.maximally_mixed(3)
    for support in [(0,), (1, 2), (0, 1, 2)]:
        assert expectation(mixed, Observable(((support, 1.0),))) == pytest.approx(0.0, abs=1e-15)


def test_expectation_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        expectation(DensityState.zero(2), Observable.z(3))


@pytest.mark.parametrize("steps", [1, 2])
@pytest.mark.parametrize("p1, p2", [(0.0, 0.0), (0.001, 0.0095), (0.02, 0.3)])
def test_simulator_matches_dense_oracle(steps, p1, p2):
    c = build_qtc(3, steps)
    rho = simulate(c, depol(p1, p2)).matrix
    ref = simulate_dense(c, p1, p2)
    assert np.allclose(rho, ref, atol=1e-12)
    for q in range(3):
        assert exact_expectation(c, Observable.z(q), depol(p1, p2)) == pytest.approx(
            z_string_expectation(ref, (q,), 3), abs=1e-12
        )


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.tuples(st.sampled_from(["rx", "rz", "h", "cz"]), st.integers(0, 2), st.integers(0, 2), st.floats(-3, 3)),
        max_size=12,
    ),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_trace_and_positivity_hold(spec, p1, p2):
    gates = []
    for kind, a, b, angle in spec:
        if kind == "cz":
            if a == b:
                continue
            gates.append(Gate(GateKind.CZ, (a, b)))
        elif kind == "h":
            gates.append(Gate(GateKind.H, (a,)))
        else:
            gates.append(Gate(GateKind(kind), (a,), angle))
    state = simulate(Circuit(3, tuple(gates)), depol(p1, p2))
    assert abs(state.trace - 1) < 1e-10
    assert state.min_eigenvalue() >= -1e-9


@pytest.mark.parametrize("t", [0.0, 3.5, 47.0])
def test_noise_free_is_time_independent(t):
    c = build_qtc(4, 2)
    assert exact_expectation(c, Observable.magnetisation(4), preset("ideal"), t) == exact_expectation(
        c, Observable.magnetisation(4)
    )


def test_eigenstate_sampling_is_exact():
    for seed in range(5):
        est = sample_shots(DensityState.zero(2), Observable.z(1), 100, np.random.default_rng(seed))
        assert est.value == 1.0 and est.std_error == 0.0
    flipped = simulate(circuit_from_gates(1, [("rx", (0,), math.pi)]))
    est = sample_shots(flipped, Observable.z(0), 50, np.random.default_rng(0))
    assert est.value == pytest.approx(-1.0) and est.std_error == pytest.approx(0.0, abs=1e-7)


def test_mixed_state_sampling_concentrates():
    mixed = DensityState.maximally_mixed(2)
    hits = sum(
        abs(sample_shots(mixed, Observable.z(0), 4096, np.random.default_rng(s)).value) <= 0.05 for s in range(500)
    )
    assert hits >= 0.99 * 500


def test_sampling_is_deterministic_for_a_seed():
    state = simulate(build_qtc(4, 1), depol(0.001, 0.01))
    a = sample_shots(state, Observable.magnetisation(4), 1000, np.random.default_rng(42))
    b = sample_shots(state, Observable.magnetisation(4), 1000, np.random.default_rng(42))
    assert a == b


def test_sampling_rejects_zero_shots():
    with pytest.raises(InvalidArgumentError):
        sample_shots(DensityState.zero(1), Observable.z(0), 0, np.random.default_rng(0))


def test_shot_consistency_at_large_n():
    state = simulate(build_qtc(4, 1), depol(0.001, 0.01))
    exact = expectation(state, Observable.z(0))
    est = sample_shots(state, Observable.z(0), 2**20, np.random.default_rng(3))
    assert abs(est.value - exact) < 5e-3
    assert est.std_error == pytest.approx(math.sqrt((1 - exact**2) / 2**20), rel=0.05)


def test_inverse_circuit_undoes_the_unitary():
    c = build_qtc(3, 2)
    both = Circuit(3, c.gates + c.inverse().gates)
    assert np.allclose(simulate(both).matrix, DensityState.zero(3).matrix, atol=1e-12)
