"""Native gate sets and the rule-based reference transpiler.

Each rewrite rule maps a foreign gate to a template over the target set
(possibly via intermediate gates that themselves have rules; expansion is
iterated until everything is native).  Angle slots are affine in the foreign
gate's angle: value = coeff * theta + offset.  All templates preserve the
foreign gate's unitary up to a global phase; this is enforced by tests
rather than asserted here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .qasm import GATE_SIGNATURES, Circuit, GateApplication

_PI = math.pi


@dataclass(frozen=True)
class TemplateOp:
    gate: str
    # each parameter slot is (coeff, offset): coeff * theta + offset
    params: tuple[tuple[float, float], ...]
    qubits: tuple[int, ...]  # indices into the foreign gate's qubit list


@dataclass(frozen=True)
class GateSetConfig:
    name: str
    gates: tuple[str, ...]
    rules: dict[str, tuple[TemplateOp, ...]] = field(default_factory=dict)
    global_phase_note: str = ""

    def __post_init__(self):
        for g in self.gates:
            if g not in GATE_SIGNATURES:
                raise ValueError(f"unknown gate {g!r} in set {self.name!r}")


class TranspileError(Exception):
    pass


def _op(gate, params=(), qubits=(0,)):
    return TemplateOp(gate, tuple(params), tuple(qubits))


_FIX = lambda v: (0.0, v)  # fixed angle slot
_THETA = (1.0, 0.0)  # pass the foreign angle through

# Shared single-qubit rewrites into {rz, sx} (used by eagle and heron).
_RZ_SX_RULES = {
    "h": (_op("rz", [_FIX(_PI / 2)]), _op("sx"), _op("rz", [_FIX(_PI / 2)])),
    "t": (_op("rz", [_FIX(_PI / 4)]),),
    "tdg": (_op("rz", [_FIX(-_PI / 4)]),),
    "s": (_op("rz", [_FIX(_PI / 2)]),),
    "sdg": (_op("rz", [_FIX(-_PI / 2)]),),
    "rx": (_op("h"), _op("rz", [_THETA]), _op("h")),
    "ry": (_op("sdg"), _op("rx", [_THETA]), _op("s")),
}

EAGLE = GateSetConfig(
    name="eagle",
    gates=("rz", "sx", "x", "cx"),
    rules={
        **_RZ_SX_RULES,
        "cz": (_op("h", qubits=[1]), _op("cx", qubits=[0, 1]), _op("h", qubits=[1])),
        "rxx": (
            _op("h", qubits=[0]),
            _op("h", qubits=[1]),
            _op("cx", qubits=[0, 1]),
            _op("rz", [_THETA], qubits=[1]),
            _op("cx", qubits=[0, 1]),
            _op("h", qubits=[0]),
            _op("h", qubits=[1]),
        ),
    },
    global_phase_note="h and rotation rewrites carry a global phase, harmless "
    "under the trace-overlap fidelity",
)

HERON = GateSetConfig(
    name="heron",
    gates=("rz", "sx", "x", "cz"),
    rules={
        **_RZ_SX_RULES,
        "cx": (_op("h", qubits=[1]), _op("cz", qubits=[0, 1]), _op("h", qubits=[1])),
        "rxx": (
            _op("h", qubits=[0]),
            _op("h", qubits=[1]),
            _op("cx", qubits=[0, 1]),
            _op("rz", [_THETA], qubits=[1]),
            _op("cx", qubits=[0, 1]),
            _op("h", qubits=[0]),
            _op("h", qubits=[1]),
        ),
    },
    global_phase_note="as eagle; cx is reached through cz conjugated by h",
)

IONQ = GateSetConfig(
    name="ionq",
    gates=("rx", "ry", "rz", "rxx"),
    rules={
        "x": (_op("rx", [_FIX(_PI)]),),
        "sx": (_op("rx", [_FIX(_PI / 2)]),),
        "h": (_op("rx", [_FIX(_PI)]), _op("ry", [_FIX(-_PI / 2)])),
        "t": (_op("rz", [_FIX(_PI / 4)]),),
        "tdg": (_op("rz", [_FIX(-_PI / 4)]),),
        "s": (_op("rz", [_FIX(_PI / 2)]),),
        "sdg": (_op("rz", [_FIX(-_PI / 2)]),),
        "cx": (
            _op("ry", [_FIX(_PI / 2)], qubits=[0]),
            _op("rxx", [_FIX(_PI / 2)], qubits=[0, 1]),
            _op("rx", [_FIX(-_PI / 2)], qubits=[0]),
            _op("rx", [_FIX(-_PI / 2)], qubits=[1]),
            _op("ry", [_FIX(-_PI / 2)], qubits=[0]),
        ),
        "cz": (_op("h", qubits=[1]), _op("cx", qubits=[0, 1]), _op("h", qubits=[1])),
    },
    global_phase_note="x = i rx(pi), sx = e^{i pi/4} rx(pi/2); the cx template "
    "is the Moelmer-Soerensen identity",
)

CLIFFORD_T = GateSetConfig(
    name="clifford_t",
    gates=("h", "t", "tdg", "cx"),
    rules={
        "s": (_op("t"), _op("t")),
        "sdg": (_op("tdg"), _op("tdg")),
        "x": (_op("h"), _op("t"), _op("t"), _op("t"), _op("t"), _op("h")),
        "sx": (_op("h"), _op("t"), _op("t"), _op("h")),
        "cz": (_op("h", qubits=[1]), _op("cx", qubits=[0, 1]), _op("h", qubits=[1])),
    },
    global_phase_note="continuous rotations have no exact rule here; use the "
    "Solovay-Kitaev decomposer instead",
)

CLIFFORD_S = GateSetConfig(
    name="clifford_s",
    gates=("h", "s", "sdg", "cx"),
    rules={
        "x": (_op("h"), _op("s"), _op("s"), _op("h")),
        "sx": (_op("h"), _op("s"), _op("h")),
        "cz": (_op("h", qubits=[1]), _op("cx", qubits=[0, 1]), _op("h", qubits=[1])),
    },
    global_phase_note="not universal: t/tdg and continuous rotations are "
    "inexpressible here",
)

GATE_SETS: dict[str, GateSetConfig] = {
    gs.name: gs for gs in (EAGLE, IONQ, HERON, CLIFFORD_T, CLIFFORD_S)
}


def get_gate_set(name: str) -> GateSetConfig:
    try:
        return GATE_SETS[name]
    except KeyError:
        raise KeyError(
            f"unknown gate set {name!r}; choose from {sorted(GATE_SETS)}"
        ) from None


_MAX_EXPANSION_DEPTH = 10


def _expand(op: GateApplication, target: GateSetConfig, depth: int) -> list[GateApplication]:
    if op.gate_name in target.gates:
        return [op]
    if depth >= _MAX_EXPANSION_DEPTH:
        raise TranspileError(
            f"rule expansion for {op.gate_name!r} did not terminate"
        )
    rule = target.rules.get(op.gate_name)
    if rule is None:
        raise TranspileError(
            f"no rule rewrites {op.gate_name!r} into gate set {target.name!r}"
        )
    theta = op.params[0] if op.params else 0.0
    out: list[GateApplication] = []
    for t in rule:
        params = tuple(coeff * theta + offset for coeff, offset in t.params)
        qubits = tuple(op.qubits[i] for i in t.qubits)
        out.extend(_expand(GateApplication(t.gate, params, qubits), target, depth + 1))
    return out


def transpile_rules(circuit: Circuit, target: GateSetConfig) -> Circuit:
    """Rewrite every gate into the target set, preserving the unitary up to
    global phase.  Circuits already in the target set are returned unchanged."""
    if all(op.gate_name in target.gates for op in circuit.ops):
        return circuit
    ops: list[GateApplication] = []
    for op in circuit.ops:
        ops.extend(_expand(op, target, 0))
    return Circuit(
        num_qubits=circuit.num_qubits,
        num_clbits=circuit.num_clbits,
        ops=tuple(ops),
        has_final_measure=circuit.has_final_measure,
    )
