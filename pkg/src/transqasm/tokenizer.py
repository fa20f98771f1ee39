"""Circuit <-> token-sequence conversion.

Circuits are flattened into a meta-code: special tokens, a compact header,
gate names, qubit/clbit tokens (``q1`` instead of ``q[1];``), and discretized
rotation angles.  Every angle is rounded to two decimals, reduced mod 2*pi
into [0, 2*pi), then floor-scaled onto a grid of ``lam`` uniform sectors;
bin i is emitted as the strict triple <PARAM_START> PARAM_i <PARAM_END>.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .qasm import GATE_SIGNATURES, Circuit, GateApplication

TWO_PI = 2.0 * math.pi

PAD, BOS, EOS, PARAM_START, PARAM_END = (
    "<PAD>",
    "<BOS>",
    "<EOS>",
    "<PARAM_START>",
    "<PARAM_END>",
)
_STRUCTURAL = ("OPENQASM", "qreg", "creg", "measure", "->")

# fixed gate order so vocabularies are reproducible
GATE_TOKEN_ORDER = (
    "rz", "sx", "x", "cx", "rx", "ry", "rxx", "cz", "h", "t", "tdg", "s", "sdg",
)


class DecodeError(Exception):
    """A token sequence that does not spell a valid circuit."""

    def __init__(self, position: int, reason: str):
        super().__init__(f"token {position}: {reason}")
        self.position = position
        self.reason = reason


class EncodeError(Exception):
    pass


@dataclass(frozen=True)
class AngleBinner:
    lam: int = 128
    rounding: int = 2

    def __post_init__(self):
        if self.lam < 2:
            raise ValueError("grid size must be >= 2")

    def bin(self, theta: float) -> int:
        if not math.isfinite(theta):
            raise ValueError(f"non-finite angle {theta!r}")
        rounded = round(theta, self.rounding)
        norm = rounded % TWO_PI
        if norm >= TWO_PI:  # float wrap-around of tiny negatives
            norm = 0.0
        return min(int(norm / TWO_PI * self.lam), self.lam - 1)

    def unbin(self, i: int) -> float:
        if not 0 <= i < self.lam:
            raise ValueError(f"bin {i} out of range [0, {self.lam})")
        return i / self.lam * TWO_PI


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]
    qmax: int
    lam: int
    binner: AngleBinner
    _ids: dict[str, int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_ids", {t: i for i, t in enumerate(self.tokens)})
        if len(self._ids) != len(self.tokens):
            raise ValueError("duplicate tokens")

    @property
    def size(self) -> int:
        return len(self.tokens)

    def id(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise KeyError(f"token {token!r} not in vocabulary") from None

    def token(self, token_id: int) -> str:
        return self.tokens[token_id]

    @property
    def pad_id(self) -> int:
        return self._ids[PAD]

    @property
    def bos_id(self) -> int:
        return self._ids[BOS]

    @property
    def eos_id(self) -> int:
        return self._ids[EOS]

    def to_json(self) -> str:
        return json.dumps(
            {"tokens": list(self.tokens), "qmax": self.qmax, "lam": self.lam,
             "rounding": self.binner.rounding},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        data = json.loads(text)
        return cls(
            tokens=tuple(data["tokens"]),
            qmax=data["qmax"],
            lam=data["lam"],
            binner=AngleBinner(lam=data["lam"], rounding=data.get("rounding", 2)),
        )

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()


@lru_cache(maxsize=8)
def build_vocabulary(qmax: int = 5, lam: int = 128, rounding: int = 2) -> Vocabulary:
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    tokens = [PAD, BOS, EOS, PARAM_START, PARAM_END]
    tokens.extend(_STRUCTURAL)
    tokens.extend(f"REG_{k}" for k in range(1, qmax + 1))
    tokens.extend(GATE_TOKEN_ORDER)
    tokens.extend(f"q{i}" for i in range(qmax))
    tokens.extend(f"c{i}" for i in range(qmax))
    tokens.extend(f"PARAM_{i}" for i in range(lam))
    return Vocabulary(
        tokens=tuple(tokens), qmax=qmax, lam=lam,
        binner=AngleBinner(lam=lam, rounding=rounding),
    )


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]
    source_hash: str = ""

    def __len__(self):
        return len(self.ids)


def encode(circuit: Circuit, vocab: Vocabulary) -> TokenSequence:
    if circuit.num_qubits > vocab.qmax:
        raise EncodeError(
            f"{circuit.num_qubits} qubits exceed the vocabulary's qmax={vocab.qmax}"
        )
    ids = [vocab.bos_id, vocab.id("OPENQASM"), vocab.id("qreg"),
           vocab.id(f"REG_{circuit.num_qubits}")]
    if circuit.num_clbits:
        if circuit.num_clbits > vocab.qmax:
            raise EncodeError(
                f"{circuit.num_clbits} clbits exceed the vocabulary's qmax={vocab.qmax}"
            )
        ids += [vocab.id("creg"), vocab.id(f"REG_{circuit.num_clbits}")]
    for op in circuit.ops:
        ids.append(vocab.id(op.gate_name))
        for theta in op.params:
            ids += [
                vocab.id(PARAM_START),
                vocab.id(f"PARAM_{vocab.binner.bin(theta)}"),
                vocab.id(PARAM_END),
            ]
        ids += [vocab.id(f"q{q}") for q in op.qubits]
    if circuit.has_final_measure:
        for i in range(circuit.num_qubits):
            ids += [vocab.id("measure"), vocab.id(f"q{i}"), vocab.id("->"),
                    vocab.id(f"c{i}")]
    ids.append(vocab.eos_id)
    source_hash = hashlib.sha256(bytes(str(ids), "ascii")).hexdigest()[:16]
    return TokenSequence(ids=tuple(ids), source_hash=source_hash)


class _Cursor:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise DecodeError(self.pos, "unexpected end of sequence")
        if expected is not None and tok != expected:
            raise DecodeError(self.pos, f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok


def decode(seq: TokenSequence, vocab: Vocabulary) -> Circuit:
    """Reconstruct a circuit, reversing the binning via bin -> i/lam * 2*pi.

    Total over arbitrary id sequences: any structural violation raises
    DecodeError with the offending position.
    """
    try:
        tokens = [vocab.token(i) for i in seq.ids]
    except IndexError:
        raise DecodeError(0, "token id outside the vocabulary") from None
    cur = _Cursor(tokens)
    cur.take(BOS)
    cur.take("OPENQASM")
    cur.take("qreg")
    reg = cur.take()
    if not reg.startswith("REG_"):
        raise DecodeError(cur.pos - 1, f"expected register size, found {reg!r}")
    num_qubits = int(reg[4:])
    num_clbits = 0
    if cur.peek() == "creg":
        cur.take()
        reg = cur.take()
        if not reg.startswith("REG_"):
            raise DecodeError(cur.pos - 1, f"expected register size, found {reg!r}")
        num_clbits = int(reg[4:])

    ops: list[GateApplication] = []
    measured: list[int] = []
    while True:
        tok = cur.peek()
        if tok is None:
            raise DecodeError(cur.pos, "sequence ended without <EOS>")
        if tok == EOS:
            cur.take()
            if cur.peek() is not None and cur.peek() != PAD:
                raise DecodeError(cur.pos, "trailing tokens after <EOS>")
            while cur.peek() == PAD:
                cur.take()
            if cur.peek() is not None:
                raise DecodeError(cur.pos, "trailing tokens after <EOS>")
            break
        if tok == "measure":
            cur.take()
            q = _take_qubit(cur, num_qubits)
            cur.take("->")
            c = cur.take()
            if not (c.startswith("c") and c[1:].isdigit()):
                raise DecodeError(cur.pos - 1, f"expected clbit, found {c!r}")
            ci = int(c[1:])
            if ci >= num_clbits:
                raise DecodeError(cur.pos - 1, f"clbit {ci} out of range")
            if q != ci or q != len(measured):
                raise DecodeError(cur.pos - 1, "measurements must be q_i -> c_i in order")
            measured.append(q)
            continue
        if measured:
            raise DecodeError(cur.pos, "gate token after measurement")
        if tok not in GATE_SIGNATURES:
            raise DecodeError(cur.pos, f"expected gate name, found {tok!r}")
        cur.take()
        arity, n_params = GATE_SIGNATURES[tok]
        params = []
        for _ in range(n_params):
            cur.take(PARAM_START)
            p = cur.take()
            if not p.startswith("PARAM_"):
                raise DecodeError(cur.pos - 1, f"expected angle bin, found {p!r}")
            params.append(vocab.binner.unbin(int(p[6:])))
            cur.take(PARAM_END)
        qubits = tuple(_take_qubit(cur, num_qubits) for _ in range(arity))
        if arity == 2 and qubits[0] == qubits[1]:
            raise DecodeError(cur.pos - 1, f"{tok} needs distinct qubits")
        ops.append(GateApplication(tok, tuple(params), qubits))

    has_measure = bool(measured)
    if has_measure and len(measured) != num_qubits:
        raise DecodeError(len(tokens) - 1, "measurement does not cover every qubit")
    try:
        return Circuit(
            num_qubits=num_qubits,
            num_clbits=num_clbits,
            ops=tuple(ops),
            has_final_measure=has_measure,
        )
    except ValueError as exc:
        raise DecodeError(len(tokens) - 1, str(exc)) from None


def _take_qubit(cur: _Cursor, num_qubits: int) -> int:
    tok = cur.take()
    if not (tok.startswith("q") and tok[1:].isdigit()):
        raise DecodeError(cur.pos - 1, f"expected qubit, found {tok!r}")
    q = int(tok[1:])
    if q >= num_qubits:
        raise DecodeError(cur.pos - 1, f"qubit {q} out of range")
    return q
