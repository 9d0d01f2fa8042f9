"""Small-circuit density-matrix simulation."""

from .circuits import (
    DEFAULT_COUPLING_ANGLE,
    DEFAULT_FIELD_ANGLE,
    MAX_QUBITS,
    Circuit,
    Gate,
    GateKind,
    Observable,
    build_qtc,
    circuit_from_gates,
)
from .states import DensityState, ShotEstimate, expectation, sample_shots
from .simulator import exact_expectation, simulate

__all__ = [
    "DEFAULT_COUPLING_ANGLE",
    "DEFAULT_FIELD_ANGLE",
    "MAX_QUBITS",
    "Circuit",
    "DensityState",
    "Gate",
    "GateKind",
    "Observable",
    "ShotEstimate",
    "build_qtc",
    "circuit_from_gates",
    "exact_expectation",
    "expectation",
    "sample_shots",
    "simulate",
]
