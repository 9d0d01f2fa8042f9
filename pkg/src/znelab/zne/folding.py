"""Digital noise amplification by unitary folding."""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

from ..exceptions import InvalidArgumentError
from ..sim.circuits import Circuit, Gate


class FoldingStrategy(str, Enum):
    GLOBAL = "global"
    LOCAL_LEFT = "local_left"
    LOCAL_RIGHT = "local_right"


def fold_counts(n_gates: int, scale_factor: float) -> tuple[int, int]:
    """Whole-circuit folds ``n`` and extra single-gate folds ``s`` for ``scale_factor``.

    ``s`` uses round-half-to-even so results agree across platforms.
    """
    if scale_factor < 1 or math.isnan(scale_factor):
        raise InvalidArgumentError(f"scale factor must be >= 1, got {scale_factor}")
    n = int((scale_factor - 1) // 2)
    s = round(n_gates * (scale_factor - (2 * n + 1)) / 2)
    return n, min(int(s), n_gates)


def _partial_indices(n_gates: int, s: int, strategy: FoldingStrategy) -> list[int]:
    if s == 0:
        return []
    if strategy is FoldingStrategy.LOCAL_LEFT:
        return list(range(s))
    if strategy is FoldingStrategy.LOCAL_RIGHT:
        return list(range(n_gates - s, n_gates))
    # start-anchored, evenly strided subset
    return sorted({(i * n_gates) // s for i in range(s)})


@lru_cache(maxsize=1024)
def fold(circuit: Circuit, scale_factor: float, strategy: FoldingStrategy = FoldingStrategy.LOCAL_LEFT) -> Circuit:
    """Amplify noise by folding: ``C (C^dagger C)^n`` plus ``s`` gate-level folds ``G G^dagger G``.

    The gate count is ``d + 2 (n d + s)``; the ideal unitary is unchanged.
    """
    strategy = FoldingStrategy(strategy)
    d = len(circuit.gates)
    n, s = fold_counts(d, float(scale_factor))
    selected = set(_partial_indices(d, s, strategy))
    gates: list[Gate] = []
    for i, g in enumerate(circuit.gates):
        gates.append(g)
        if i in selected:
            gates.extend((g.adjoint(), g))
    inverse = tuple(g.adjoint() for g in reversed(circuit.gates))
    for _ in range(n):
        gates.extend(inverse)
        gates.extend(circuit.gates)
    return Circuit(circuit.n_qubits, tuple(gates), label=f"{circuit.label}@{scale_factor:g}")
