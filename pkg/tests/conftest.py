import math

import numpy as np
from hypothesis import strategies as st

from transqasm.qasm import GATE_SIGNATURES, Circuit, GateApplication

ALL_GATES = sorted(GATE_SIGNATURES)


@st.composite
def gate_applications(draw, num_qubits: int, gates=None):
    pool = [
        g
        for g in (gates or ALL_GATES)
        if GATE_SIGNATURES[g][0] <= num_qubits
    ]
    name = draw(st.sampled_from(pool))
    arity, n_params = GATE_SIGNATURES[name]
    qubits = draw(
        st.lists(
            st.integers(0, num_qubits - 1), min_size=arity, max_size=arity, unique=True
        )
    )
    params = tuple(
        draw(st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False))
        for _ in range(n_params)
    )
    return GateApplication(name, params, tuple(qubits))


@st.composite
def circuits(draw, max_qubits: int = 5, max_ops: int = 12, gates=None, measure=True):
    n = draw(st.integers(1, max_qubits))
    ops = draw(st.lists(gate_applications(n, gates=gates), max_size=max_ops))
    has_measure = draw(st.booleans()) if measure else False
    return Circuit(
        num_qubits=n,
        num_clbits=n if has_measure else 0,
        ops=tuple(ops),
        has_final_measure=has_measure,
    )


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))
