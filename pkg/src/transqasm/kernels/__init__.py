"""Gate-application kernel selection.

The compiled Cython kernel is used when available; setting the environment
variable ``TRANSQASM_PURE_PYTHON=1`` forces the NumPy reference kernel.
Both expose ``apply_gate(matrix, gate, qubits, n)`` with identical semantics.
"""

from __future__ import annotations

import os

from . import _pyref

apply_gate_py = _pyref.apply_gate

if os.environ.get("TRANSQASM_PURE_PYTHON") == "1":
    apply_gate = _pyref.apply_gate
    KERNEL_BACKEND = "python"
else:
    try:
        from . import _gatekernel

        apply_gate = _gatekernel.apply_gate
        KERNEL_BACKEND = "cython"
    except ImportError:  # pragma: no cover - build-dependent
        apply_gate = _pyref.apply_gate
        KERNEL_BACKEND = "python"

__all__ = ["apply_gate", "apply_gate_py", "KERNEL_BACKEND"]
