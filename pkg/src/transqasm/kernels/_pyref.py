"""Pure NumPy gate-application kernel (fallback when the compiled extension
is unavailable).  Semantics must match ``_gatekernel`` exactly."""

from __future__ import annotations

import numpy as np


def apply_gate(matrix: np.ndarray, gate: np.ndarray, qubits: tuple[int, ...], n: int) -> None:
    """In-place left-multiplication ``matrix <- embed(gate, qubits) @ matrix``.

    ``matrix`` is (2^n, 2^n) complex128; qubit 0 is the most significant
    row-index bit; ``gate`` is (2, 2) or (4, 4) with the first listed qubit
    as its most significant bit.
    """
    dim = matrix.shape[0]
    if len(qubits) == 1:
        (k,) = qubits
        view = matrix.reshape(2**k, 2, dim >> (k + 1), dim)
        out = np.tensordot(gate, view, axes=([1], [1]))  # (2, 2^k, after, dim)
        matrix[...] = np.moveaxis(out, 0, 1).reshape(dim, dim)
    else:
        k1, k2 = qubits
        t = matrix.reshape((2,) * n + (dim,))
        g4 = gate.reshape(2, 2, 2, 2)
        out = np.tensordot(g4, t, axes=([2, 3], [k1, k2]))
        matrix[...] = np.moveaxis(out, [0, 1], [k1, k2]).reshape(dim, dim)
