"""Seeded random circuit generation.

Depth counts layers: within a layer every qubit is touched at most once.
Gates are drawn uniformly from the set's gates (restricted to single-qubit
gates when fewer than two unassigned qubits remain), angles uniformly from
[0, 2*pi), and two-qubit operands as uniform distinct pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gatesets import GateSetConfig
from .qasm import GATE_SIGNATURES, Circuit, GateApplication

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RandomCircuitSpec:
    num_qubits: int
    depth: int
    include_measure: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")


def random_circuit(spec: RandomCircuitSpec, gate_set: GateSetConfig) -> Circuit:
    one_q = [g for g in gate_set.gates if GATE_SIGNATURES[g][0] == 1]
    two_q = [g for g in gate_set.gates if GATE_SIGNATURES[g][0] == 2]
    if spec.num_qubits < 2 and not one_q:
        raise ValueError(
            f"gate set {gate_set.name!r} has only two-qubit gates; "
            "need num_qubits >= 2"
        )
    rng = np.random.default_rng(spec.seed)
    ops: list[GateApplication] = []
    for _ in range(spec.depth):
        free = list(range(spec.num_qubits))
        rng.shuffle(free)
        while free:
            pool = one_q + two_q if len(free) >= 2 else one_q
            gate = pool[int(rng.integers(len(pool)))]
            arity, n_params = GATE_SIGNATURES[gate]
            qubits = tuple(free.pop() for _ in range(arity))
            params = tuple(float(rng.uniform(0.0, TWO_PI)) for _ in range(n_params))
            ops.append(GateApplication(gate, params, qubits))
    return Circuit(
        num_qubits=spec.num_qubits,
        num_clbits=spec.num_qubits if spec.include_measure else 0,
        ops=tuple(ops),
        has_final_measure=spec.include_measure,
    )
