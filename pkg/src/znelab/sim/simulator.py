"""Exact density-matrix simulation under a timed noise model."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..exceptions import InvalidArgumentError
from .circuits import Circuit, Observable
from .states import DensityState, apply_unitary, term_expectations


def simulate(circuit: Circuit, noise=None, time: float = 0.0) -> DensityState:
    """Run ``circuit`` from ``|0...0>``, applying each gate then its noise channel."""
    from ..noise import TimedNoiseModel, apply_noise, apply_readout

    if noise is None:
        noise = TimedNoiseModel()
    n = circuit.n_qubits
    state = DensityState.zero(n)
    for gate in circuit.gates:
        state = DensityState(apply_unitary(state.matrix, gate.unitary(), gate.targets, n), n)
        state = apply_noise(state, gate, noise, time)
    return apply_readout(state, noise)


@lru_cache(maxsize=4096)
def exact_term_expectations(circuit: Circuit, observable: Observable, noise, time: float) -> tuple[float, ...]:
    """Cached exact term expectations; every repetition at a fixed (circuit,
    noise, time) shares the same density matrix, only shots differ."""
    if observable.max_qubit >= circuit.n_qubits:
        raise InvalidArgumentError("observable addresses qubits outside the circuit")
    return tuple(term_expectations(simulate(circuit, noise, time), observable))


def exact_expectation(circuit: Circuit, observable: Observable, noise=None, time: float = 0.0) -> float:
    from ..noise import TimedNoiseModel

    if noise is None:
        noise = TimedNoiseModel()
    weights = np.array([w for _, w in observable.terms])
    return float(weights @ np.asarray(exact_term_expectations(circuit, observable, noise, float(time))))
