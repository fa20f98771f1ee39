"""Circuit-to-unitary simulation and the phase-invariant fidelity functional."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .gates import gate_matrix
from .qasm import Circuit

DEFAULT_QUBIT_CAP = 10


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    dim: int
    trace_overlap: complex


def circuit_unitary(circuit: Circuit, qubit_cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Dense unitary implemented by the circuit (measurements ignored).

    Gates are applied in program order: U = U_m ... U_2 U_1.
    """
    n = circuit.num_qubits
    if n > qubit_cap:
        raise DimensionError(f"{n} qubits exceeds the cap of {qubit_cap}")
    dim = 2**n
    u = np.eye(dim, dtype=np.complex128)
    for op in circuit.ops:
        g = np.ascontiguousarray(gate_matrix(op.gate_name, op.params))
        kernels.apply_gate(u, g, op.qubits, n)
    return u


def fidelity(u_ref: np.ndarray, u_pred: np.ndarray) -> FidelityReport:
    """F = |Tr(U_ref^dag U_pred)|^2 / d^2, invariant under global phase."""
    if u_ref.shape != u_pred.shape or u_ref.shape[0] != u_ref.shape[1]:
        raise DimensionError(
            f"dimension mismatch: {u_ref.shape} vs {u_pred.shape}"
        )
    d = u_ref.shape[0]
    overlap = complex(np.trace(u_ref.conj().T @ u_pred))
    f = abs(overlap) ** 2 / d**2
    return FidelityReport(fidelity=min(f, 1.0), dim=d, trace_overlap=overlap)


def fidelity_loss(u_ref: np.ndarray, u_pred: np.ndarray) -> float:
    return 1.0 - fidelity(u_ref, u_pred).fidelity


def circuit_fidelity(a: Circuit, b: Circuit) -> float:
    return fidelity(circuit_unitary(a), circuit_unitary(b)).fidelity
