"""Dense density matrices, channel kernels and shot sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..exceptions import InvalidArgumentError
from .circuits import Observable

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True, eq=False)
class DensityState:
    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        dim = 2**self.n_qubits
        if self.matrix.shape != (dim, dim):
            raise InvalidArgumentError(f"expected a {dim}x{dim} matrix, got {self.matrix.shape}")

    @classmethod
    def zero(cls, n_qubits: int) -> "DensityState":
        dim = 2**n_qubits
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return cls(rho, n_qubits)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityState":
        dim = 2**n_qubits
        return cls(np.eye(dim, dtype=complex) / dim, n_qubits)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def probabilities(self) -> np.ndarray:
        return np.clip(np.real(np.diag(self.matrix)), 0.0, None)


@dataclass(frozen=True)
class ShotEstimate:
    value: float
    std_error: float
    n_shots: int


def _as_tensor(rho: np.ndarray, n: int) -> np.ndarray:
    return rho.reshape((2,) * (2 * n))


def apply_unitary(rho: np.ndarray, unitary: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Return ``U rho U^dagger`` with ``U`` acting on ``targets``."""
    k = len(targets)
    u = unitary.reshape((2,) * (2 * k))
    t = _as_tensor(rho, n)
    row_axes = list(targets)
    col_axes = [n + q for q in targets]
    # rows: contract U's input legs with rho's row legs
    t = np.tensordot(u, t, axes=(list(range(k, 2 * k)), row_axes))
    t = np.moveaxis(t, list(range(k)), row_axes)
    t = np.tensordot(u.conj(), t, axes=(list(range(k, 2 * k)), col_axes))
    t = np.moveaxis(t, list(range(k)), col_axes)
    return t.reshape(rho.shape)


def depolarize(rho: np.ndarray, targets: Sequence[int], p: float, n: int) -> np.ndarray:
    """Local depolarising channel: with probability ``p`` the marginal on
    ``targets`` is replaced by the maximally mixed state."""
    if p == 0.0:
        return rho
    k = len(targets)
    letters = list(_LETTERS[: 2 * n])
    for q in targets:
        letters[n + q] = letters[q]
    reduced_out = [l for i, l in enumerate(letters) if i not in targets and i - n not in targets]
    subs = "".join(letters) + "->" + "".join(reduced_out)
    reduced = np.einsum(subs, _as_tensor(rho, n))
    # reinsert the traced legs as an identity / 2^k
    ident = np.eye(2**k, dtype=complex).reshape((2,) * (2 * k)) / 2**k
    full = np.tensordot(reduced, ident, axes=0)
    kept = [i for i in range(2 * n) if i not in targets and i - n not in targets]
    source_order = kept + list(targets) + [n + q for q in targets]
    full = np.moveaxis(full, list(range(2 * n)), source_order)
    return (1.0 - p) * rho + p * full.reshape(rho.shape)


def bit_flip(rho: np.ndarray, qubit: int, p: float, n: int) -> np.ndarray:
    if p == 0.0:
        return rho
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return (1.0 - p) * rho + p * apply_unitary(rho, x, (qubit,), n)


def _parity_signs(n: int, support: Sequence[int]) -> np.ndarray:
    idx = np.arange(2**n)
    parity = np.zeros(2**n, dtype=int)
    for q in support:
        parity ^= (idx >> (n - 1 - q)) & 1
    return 1 - 2 * parity


def term_expectations(state: DensityState, obs: Observable) -> np.ndarray:
    """Exact ``<Z_S>`` for each term support ``S`` of ``obs``."""
    if obs.max_qubit >= state.n_qubits:
        raise InvalidArgumentError(
            f"observable acts on qubit {obs.max_qubit}, state has {state.n_qubits} qubits"
        )
    diag = np.diag(state.matrix)
    out = []
    for support, _ in obs.terms:
        val = np.sum(_parity_signs(state.n_qubits, support) * diag)
        if abs(val.imag) > 1e-10:
            raise InvalidArgumentError(f"non-Hermitian state: imaginary expectation residue {val.imag:.3e}")
        out.append(float(val.real))
    return np.asarray(out)


def expectation(state: DensityState, obs: Observable) -> float:
    """Exact ``tr(rho O)`` for a weighted sum of Z strings."""
    weights = np.array([w for _, w in obs.terms])
    return float(weights @ term_expectations(state, obs))


def sample_from_expectations(
    term_values: Sequence[float],
    weights: Sequence[float],
    n_shots: int,
    rng: np.random.Generator,
) -> ShotEstimate:
    """Draw ``n_shots`` +/-1 outcomes per Z-string term from its exact distribution."""
    if isinstance(n_shots, bool) or int(n_shots) != n_shots or n_shots < 1:
        raise InvalidArgumentError(f"n_shots must be a positive integer, got {n_shots!r}")
    n_shots = int(n_shots)
    value = 0.0
    var = 0.0
    for mean, w in zip(term_values, weights):
        p_plus = min(1.0, max(0.0, 0.5 * (1.0 + mean)))
        n_plus = int(rng.binomial(n_shots, p_plus))
        m = (2 * n_plus - n_shots) / n_shots
        # sample variance of the +/-1 outcomes (ddof=1)
        s2 = (1.0 - m * m) * n_shots / (n_shots - 1) if n_shots > 1 else 0.0
        value += w * m
        var += w * w * max(s2, 0.0) / n_shots
    return ShotEstimate(value=value, std_error=math.sqrt(var), n_shots=n_shots)


def sample_shots(
    state: DensityState, obs: Observable, n_shots: int, rng: np.random.Generator
) -> ShotEstimate:
    weights = [w for _, w in obs.terms]
    return sample_from_expectations(term_expectations(state, obs), weights, n_shots, rng)
