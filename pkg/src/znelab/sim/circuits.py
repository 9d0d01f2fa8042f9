"""Gate-level circuit and observable representations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from ..exceptions import InvalidArgumentError

MAX_QUBITS = 8

DEFAULT_COUPLING_ANGLE = math.pi / 4
DEFAULT_FIELD_ANGLE = 0.2


class GateKind(str, Enum):
    RX = "rx"
    RZ = "rz"
    H = "h"
    CZ = "cz"

    @property
    def n_qubits(self) -> int:
        return 2 if self is GateKind.CZ else 1

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RZ)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != self.kind.n_qubits:
            raise InvalidArgumentError(
                f"{self.kind.value} acts on {self.kind.n_qubits} qubit(s), got targets {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise InvalidArgumentError(f"gate targets must be distinct, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise InvalidArgumentError(f"negative qubit index in {self.targets}")
        if not self.kind.is_rotation and self.angle != 0.0:
            raise InvalidArgumentError(f"{self.kind.value} takes no angle")

    @property
    def gate_class(self) -> str:
        return "two-qubit" if self.kind.n_qubits == 2 else "one-qubit"

    def adjoint(self) -> "Gate":
        # H and CZ are self-adjoint
        if self.kind.is_rotation:
            return Gate(self.kind, self.targets, -self.angle)
        return self

    def unitary(self) -> np.ndarray:
        if self.kind is GateKind.RX:
            c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        if self.kind is GateKind.RZ:
            phase = np.exp(-0.5j * self.angle)
            return np.diag([phase, np.conj(phase)])
        if self.kind is GateKind.H:
            return _H.copy()
        return _CZ.copy()


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidArgumentError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        for gate in self.gates:
            if max(gate.targets) >= self.n_qubits:
                raise InvalidArgumentError(f"gate {gate} addresses a qubit outside 0..{self.n_qubits - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def two_qubit_gate_count(self) -> int:
        return sum(1 for g in self.gates if g.kind.n_qubits == 2)

    def inverse(self) -> "Circuit":
        return Circuit(self.n_qubits, tuple(g.adjoint() for g in reversed(self.gates)), self.label)


@dataclass(frozen=True)
class Observable:
    """Weighted sum of Pauli-Z strings, each given by its support set."""

    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        terms = tuple((tuple(sorted(int(q) for q in support)), float(w)) for support, w in self.terms)
        if not terms:
            raise InvalidArgumentError("an observable needs at least one term")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def z(cls, qubit: int = 0) -> "Observable":
        return cls((((qubit,), 1.0),))

    @classmethod
    def magnetisation(cls, n_qubits: int) -> "Observable":
        return cls(tuple(((q,), 1.0 / n_qubits) for q in range(n_qubits)))

    @property
    def norm(self) -> float:
        return sum(abs(w) for _, w in self.terms)

    @property
    def max_qubit(self) -> int:
        return max((max(s) for s, _ in self.terms if s), default=-1)


def _zz_interaction(a: int, b: int, angle: float) -> list[Gate]:
    # exp(-i angle/2 Z_a Z_b) as CNOT RZ CNOT with CNOT = H CZ H on the target
    return [
        Gate(GateKind.H, (b,)),
        Gate(GateKind.CZ, (a, b)),
        Gate(GateKind.H, (b,)),
        Gate(GateKind.RZ, (b,), angle),
        Gate(GateKind.H, (b,)),
        Gate(GateKind.CZ, (a, b)),
        Gate(GateKind.H, (b,)),
    ]


def build_qtc(
    n_qubits: int,
    trotter_steps: int,
    coupling_angle: float = DEFAULT_COUPLING_ANGLE,
    field_angle: float = DEFAULT_FIELD_ANGLE,
) -> Circuit:
    """Trotterised transverse-field Ising chain.

    Each step applies an X-rotation layer (the field) followed by
    nearest-neighbour ZZ interactions, each realised with two CZ gates, so the
    circuit carries ``2 * (n_qubits - 1) * trotter_steps`` two-qubit gates.
    """
    if n_qubits < 2 or n_qubits > MAX_QUBITS:
        raise InvalidArgumentError(f"n_qubits must be in [2, {MAX_QUBITS}], got {n_qubits}")
    if trotter_steps < 1:
        raise InvalidArgumentError(f"trotter_steps must be >= 1, got {trotter_steps}")
    gates: list[Gate] = []
    for _ in range(trotter_steps):
        gates.extend(Gate(GateKind.RX, (q,), field_angle) for q in range(n_qubits))
        for q in range(n_qubits - 1):
            gates.extend(_zz_interaction(q, q + 1, coupling_angle))
    return Circuit(n_qubits, tuple(gates), label=f"TC{trotter_steps}")


def circuit_from_gates(n_qubits: int, gates: Iterable[Sequence], label: str = "") -> Circuit:
    """Build a circuit from ``(kind, targets[, angle])`` tuples."""
    return Circuit(n_qubits, tuple(Gate(GateKind(g[0]), tuple(g[1]), *g[2:]) for g in gates), label)
