"""Paired-circuit dataset generation and JSONL I/O."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .gatesets import GateSetConfig, transpile_rules
from .qasm import Circuit, emit, parse
from .randgen import RandomCircuitSpec, random_circuit
from .sim import circuit_fidelity
from .tokenizer import Vocabulary, build_vocabulary, encode


@dataclass(frozen=True)
class DatasetStats:
    written: int
    dropped: int
    mean_token_len_src: float
    mean_token_len_tgt: float


@dataclass(frozen=True)
class PairRecord:
    source_qasm: str
    target_qasm: str
    n_qubits: int
    depth: int
    seed: int
    fidelity: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "PairRecord":
        return cls(**json.loads(line))


def generate_pair(
    pair_seed: int,
    spec_template: RandomCircuitSpec,
    source: GateSetConfig,
    target: GateSetConfig,
) -> tuple[PairRecord, Circuit, Circuit]:
    """One (source, target) pair; the template's depth is the maximum and the
    actual depth is drawn uniformly from 1..depth."""
    rng = np.random.default_rng(pair_seed)
    depth = int(rng.integers(1, spec_template.depth + 1))
    circuit_seed = int(rng.integers(0, 2**63))
    spec = RandomCircuitSpec(
        num_qubits=spec_template.num_qubits,
        depth=depth,
        include_measure=spec_template.include_measure,
        seed=circuit_seed,
    )
    src = random_circuit(spec, source)
    tgt = transpile_rules(src, target)
    record = PairRecord(
        source_qasm=emit(src, source),
        target_qasm=emit(tgt, target),
        n_qubits=spec.num_qubits,
        depth=depth,
        seed=pair_seed,
        fidelity=round(circuit_fidelity(src, tgt), 12),
    )
    return record, src, tgt


def build_dataset(
    n_pairs: int,
    spec_template: RandomCircuitSpec,
    source: GateSetConfig,
    target: GateSetConfig,
    context_window: int,
    out_path: str | Path,
    vocab: Vocabulary | None = None,
) -> DatasetStats:
    """Write JSONL pairs, dropping any whose either side exceeds the context
    window after tokenization.  Byte-identical output for identical inputs."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if vocab is None:
        vocab = build_vocabulary(qmax=max(5, spec_template.num_qubits))

    written = dropped = 0
    src_lens: list[int] = []
    tgt_lens: list[int] = []
    with out_path.open("w", encoding="utf-8") as fh:
        for i in range(n_pairs):
            record, src, tgt = generate_pair(
                spec_template.seed + i, spec_template, source, target
            )
            n_src = len(encode(src, vocab))
            n_tgt = len(encode(tgt, vocab))
            if n_src > context_window or n_tgt > context_window:
                dropped += 1
                continue
            fh.write(record.to_json() + "\n")
            written += 1
            src_lens.append(n_src)
            tgt_lens.append(n_tgt)

    stats = DatasetStats(
        written=written,
        dropped=dropped,
        mean_token_len_src=float(np.mean(src_lens)) if src_lens else 0.0,
        mean_token_len_tgt=float(np.mean(tgt_lens)) if tgt_lens else 0.0,
    )
    manifest = {
        "generator_version": __version__,
        "source_gate_set": source.name,
        "target_gate_set": target.name,
        "num_qubits": spec_template.num_qubits,
        "max_depth": spec_template.depth,
        "include_measure": spec_template.include_measure,
        "base_seed": spec_template.seed,
        "lam": vocab.lam,
        "context_window": context_window,
        "n_pairs_requested": n_pairs,
        "written": stats.written,
        "dropped": stats.dropped,
        "mean_token_len_src": stats.mean_token_len_src,
        "mean_token_len_tgt": stats.mean_token_len_tgt,
        "vocab_hash": vocab.content_hash(),
    }
    out_path.with_suffix(out_path.suffix + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return stats


def load_pairs(path: str | Path) -> list[PairRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(PairRecord.from_json(line))
    return records


def load_circuit_pairs(path: str | Path) -> list[tuple[Circuit, Circuit]]:
    return [
        (parse(r.source_qasm), parse(r.target_qasm)) for r in load_pairs(path)
    ]
