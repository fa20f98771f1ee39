"""OpenQASM 2.0 subset: parsing, validation and emission.

Grammar accepted (one statement per ``;``, ``//`` comments and blank lines
ignored)::

    OPENQASM 2.0;
    include "qelib1.inc";        # optional
    qreg q[n];
    creg c[m];                   # optional
    name(angle, ...) q[i](, q[j])?;
    measure q[i] -> c[i];        # only after all gates, one per qubit, in order

Exactly one quantum register named ``q`` and at most one classical register
named ``c`` are supported.  Angles are float literals or simple pi
expressions (``pi``, ``-pi/2``, ``3*pi/4``, ``0.5*pi``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

# name -> (qubit arity, parameter count); the union of every gate set the
# workbench knows about.
GATE_SIGNATURES: dict[str, tuple[int, int]] = {
    "x": (1, 0),
    "sx": (1, 0),
    "rz": (1, 1),
    "cx": (2, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rxx": (2, 1),
    "cz": (2, 0),
    "h": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
}


class ParseErrorKind(Enum):
    SYNTAX = "Syntax"
    UNKNOWN_GATE = "UnknownGate"
    ARITY_MISMATCH = "ArityMismatch"
    INDEX_OUT_OF_RANGE = "IndexOutOfRange"


class QasmParseError(Exception):
    """Raised on any non-conforming input; carries the first offending location."""

    def __init__(self, kind: ParseErrorKind, message: str, line: int, column: int):
        super().__init__(f"{kind.value} at {line}:{column}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.column = column


class QasmEmitError(Exception):
    """Raised when a circuit cannot be expressed in the requested dialect."""


@dataclass(frozen=True)
class GateApplication:
    gate_name: str
    params: tuple[float, ...]
    qubits: tuple[int, ...]

    def __post_init__(self):
        arity, n_params = GATE_SIGNATURES[self.gate_name]
        if len(self.qubits) != arity:
            raise ValueError(f"{self.gate_name} expects {arity} qubit(s)")
        if len(self.params) != n_params:
            raise ValueError(f"{self.gate_name} expects {n_params} parameter(s)")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.gate_name} needs distinct qubits")


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int = 0
    ops: tuple[GateApplication, ...] = field(default_factory=tuple)
    has_final_measure: bool = False

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.num_clbits < 0:
            raise ValueError("num_clbits must be >= 0")
        for op in self.ops:
            if any(q >= self.num_qubits or q < 0 for q in op.qubits):
                raise ValueError(f"{op.gate_name} references qubit out of range")
        if self.has_final_measure and self.num_clbits < self.num_qubits:
            raise ValueError("final measurement needs num_clbits >= num_qubits")

    def structurally_equal(self, other: "Circuit", angle_tol: float = 1e-6) -> bool:
        if (self.num_qubits, self.num_clbits, self.has_final_measure) != (
            other.num_qubits,
            other.num_clbits,
            other.has_final_measure,
        ):
            return False
        if len(self.ops) != len(other.ops):
            return False
        for a, b in zip(self.ops, other.ops):
            if a.gate_name != b.gate_name or a.qubits != b.qubits:
                return False
            if any(abs(x - y) > angle_tol for x, y in zip(a.params, b.params)):
                return False
        return True


_STMT_RE = re.compile(
    r"^(?P<name>[a-z][a-z0-9]*)\s*"
    r"(?:\(\s*(?P<params>[^()]*)\)\s*)?"
    r"(?P<args>.*)$"
)
_QARG_RE = re.compile(r"^q\[(\d+)\]$")
_CARG_RE = re.compile(r"^c\[(\d+)\]$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
# pi, -pi, pi/2, 3*pi, 3*pi/4, 0.5*pi
_PI_RE = re.compile(
    r"^(?P<sign>[+-]?)(?:(?P<k>\d+\.?\d*|\.\d+)\s*\*\s*)?pi(?:\s*/\s*(?P<m>\d+\.?\d*|\.\d+))?$"
)


def _parse_angle(text: str, line: int, col: int) -> float:
    expr = text.strip()
    if _FLOAT_RE.match(expr):
        return float(expr)
    m = _PI_RE.match(expr)
    if m:
        value = math.pi
        if m.group("k"):
            value *= float(m.group("k"))
        if m.group("m"):
            value /= float(m.group("m"))
        if m.group("sign") == "-":
            value = -value
        return value
    raise QasmParseError(
        ParseErrorKind.SYNTAX, f"cannot parse angle expression {expr!r}", line, col
    )


def _strip_comments(source: str) -> list[tuple[str, int, int]]:
    """Split into statements, keeping (text, line, column) of each start."""
    statements = []
    buffer: list[str] = []
    start: tuple[int, int] | None = None
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for colno, ch in enumerate(line, start=1):
            if ch == ";":
                text = "".join(buffer).strip()
                if text:
                    statements.append((text, *(start or (lineno, colno))))
                buffer = []
                start = None
            else:
                if not ch.isspace() and start is None:
                    start = (lineno, colno)
                buffer.append(ch)
        buffer.append(" ")
    trailing = "".join(buffer).strip()
    if trailing:
        lineno, colno = start or (1, 1)
        raise QasmParseError(
            ParseErrorKind.SYNTAX, f"missing ';' after {trailing!r}", lineno, colno
        )
    return statements


def parse(source: str) -> Circuit:
    """Parse QASM text into a Circuit, raising QasmParseError on any defect."""
    statements = _strip_comments(source)
    if not statements:
        raise QasmParseError(ParseErrorKind.SYNTAX, "empty program", 1, 1)

    num_qubits: int | None = None
    num_clbits = 0
    ops: list[GateApplication] = []
    measured: list[int] = []
    seen_version = False

    for text, line, col in statements:
        lowered = text.lower()
        if lowered.startswith("openqasm"):
            if ops or num_qubits is not None or measured:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, "OPENQASM header must come first", line, col
                )
            version = text[len("openqasm"):].strip()
            if version != "2.0":
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, f"unsupported version {version!r}", line, col
                )
            seen_version = True
            continue
        if lowered.startswith("include"):
            target = text[len("include"):].strip()
            if target != '"qelib1.inc"':
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, f"unsupported include {target!r}", line, col
                )
            continue
        if lowered.startswith("qreg") or lowered.startswith("creg"):
            kind = lowered[:4]
            decl = text[4:].strip()
            m = re.match(r"^(?P<name>[a-z][a-z0-9_]*)\[(?P<size>\d+)\]$", decl)
            if not m:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, f"malformed {kind} declaration", line, col
                )
            size = int(m.group("size"))
            expected = "q" if kind == "qreg" else "c"
            if m.group("name") != expected:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX,
                    f"only a single {kind} named {expected!r} is supported",
                    line,
                    col,
                )
            if size < 1:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, f"{kind} size must be >= 1", line, col
                )
            if kind == "qreg":
                if num_qubits is not None:
                    raise QasmParseError(
                        ParseErrorKind.SYNTAX, "duplicate qreg declaration", line, col
                    )
                num_qubits = size
            else:
                if num_clbits:
                    raise QasmParseError(
                        ParseErrorKind.SYNTAX, "duplicate creg declaration", line, col
                    )
                num_clbits = size
            continue

        if num_qubits is None:
            raise QasmParseError(
                ParseErrorKind.SYNTAX, "statement before qreg declaration", line, col
            )

        if lowered.startswith("measure"):
            m = re.match(r"^measure\s+(\S+)\s*->\s*(\S+)$", text)
            if not m:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, "malformed measure statement", line, col
                )
            qm = _QARG_RE.match(m.group(1))
            cm = _CARG_RE.match(m.group(2))
            if not qm or not cm:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, "measure operands must be q[i] -> c[i]", line, col
                )
            qi, ci = int(qm.group(1)), int(cm.group(1))
            if qi >= num_qubits:
                raise QasmParseError(
                    ParseErrorKind.INDEX_OUT_OF_RANGE, f"q[{qi}] out of range", line, col
                )
            if ci >= num_clbits:
                raise QasmParseError(
                    ParseErrorKind.INDEX_OUT_OF_RANGE, f"c[{ci}] out of range", line, col
                )
            if qi != ci or qi != len(measured):
                raise QasmParseError(
                    ParseErrorKind.SYNTAX,
                    "final measurement must be q[i] -> c[i] for i = 0..n-1 in order",
                    line,
                    col,
                )
            measured.append(qi)
            continue

        if measured:
            raise QasmParseError(
                ParseErrorKind.SYNTAX, "gate statement after measurement", line, col
            )

        m = _STMT_RE.match(text)
        if not m:
            raise QasmParseError(ParseErrorKind.SYNTAX, f"malformed statement {text!r}", line, col)
        name = m.group("name")
        if name not in GATE_SIGNATURES:
            raise QasmParseError(
                ParseErrorKind.UNKNOWN_GATE, f"unknown gate {name!r}", line, col
            )
        arity, n_params = GATE_SIGNATURES[name]

        raw_params = m.group("params")
        params: tuple[float, ...] = ()
        if raw_params is not None:
            parts = [p for p in raw_params.split(",") if p.strip()]
            params = tuple(_parse_angle(p, line, col) for p in parts)
        if len(params) != n_params:
            raise QasmParseError(
                ParseErrorKind.ARITY_MISMATCH,
                f"{name} expects {n_params} parameter(s), got {len(params)}",
                line,
                col,
            )

        args = [a.strip() for a in m.group("args").split(",") if a.strip()]
        if len(args) != arity:
            raise QasmParseError(
                ParseErrorKind.ARITY_MISMATCH,
                f"{name} expects {arity} qubit argument(s), got {len(args)}",
                line,
                col,
            )
        qubits = []
        for arg in args:
            qa = _QARG_RE.match(arg)
            if not qa:
                raise QasmParseError(
                    ParseErrorKind.SYNTAX, f"malformed qubit argument {arg!r}", line, col
                )
            qi = int(qa.group(1))
            if qi >= num_qubits:
                raise QasmParseError(
                    ParseErrorKind.INDEX_OUT_OF_RANGE, f"q[{qi}] out of range", line, col
                )
            qubits.append(qi)
        if arity == 2 and qubits[0] == qubits[1]:
            raise QasmParseError(
                ParseErrorKind.SYNTAX, f"{name} requires distinct qubits", line, col
            )
        ops.append(GateApplication(name, params, tuple(qubits)))

    if not seen_version:
        raise QasmParseError(ParseErrorKind.SYNTAX, "missing OPENQASM 2.0 header", 1, 1)
    if num_qubits is None:
        raise QasmParseError(ParseErrorKind.SYNTAX, "missing qreg declaration", 1, 1)
    has_measure = bool(measured)
    if has_measure and len(measured) != num_qubits:
        raise QasmParseError(
            ParseErrorKind.SYNTAX,
            "final measurement must cover every qubit",
            1,
            1,
        )
    return Circuit(
        num_qubits=num_qubits,
        num_clbits=num_clbits,
        ops=tuple(ops),
        has_final_measure=has_measure,
    )


def _dialect_gates(dialect) -> set[str] | None:
    if dialect is None:
        return None
    gates = getattr(dialect, "gates", dialect)
    return set(gates)


def emit(circuit: Circuit, dialect=None) -> str:
    """Render a circuit as canonical QASM text.

    ``dialect`` is a GateSetConfig (or any iterable of gate names); gates
    outside it are rejected.  Angles are printed with six decimals, so the
    output re-parses to the same circuit within 1e-6 rad.
    """
    allowed = _dialect_gates(dialect)
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for op in circuit.ops:
        if allowed is not None and op.gate_name not in allowed:
            raise QasmEmitError(
                f"gate {op.gate_name!r} is not part of the requested dialect"
            )
        params = ""
        if op.params:
            params = "(" + ",".join(f"{p:.6f}" for p in op.params) + ")"
        args = ",".join(f"q[{q}]" for q in op.qubits)
        lines.append(f"{op.gate_name}{params} {args};")
    if circuit.has_final_measure:
        for i in range(circuit.num_qubits):
            lines.append(f"measure q[{i}] -> c[{i}];")
    return "\n".join(lines) + "\n"
