"""Evaluation metrics: grammar accuracy (decoded output tokenizes back
into a circuit), mean unitary fidelity against the source circuit
(ungrammatical outputs count as 0), and teacher-forced perplexity."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import torch

from .decoding import greedy_decode_batch
from .losses import LossConfig, smoothed_ce
from .qasm import Circuit
from .sim import DimensionError, circuit_fidelity
from .tokenizer import DecodeError, TokenSequence, Vocabulary, decode


@dataclass(frozen=True)
class EvalReport:
    grammar_accuracy: float
    mean_fidelity: float
    perplexity: float
    l_ce: float
    l_f: float
    l_total: float
    ce_unsmoothed: float
    n_samples: int
    n_invalid: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def pad_batch(sequences, pad_id: int) -> torch.Tensor:
    width = max(len(s) for s in sequences)
    out = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    for i, seq in enumerate(sequences):
        out[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
    return out


def evaluate(
    model,
    pairs: list[tuple[tuple[int, ...], tuple[int, ...], Circuit]],
    vocab: Vocabulary,
    lc: LossConfig,
    step: int = 0,
    batch_size: int = 32,
) -> EvalReport:
    """``pairs`` holds (source ids, target ids, parsed source circuit)."""
    if not pairs:
        raise ValueError("empty evaluation split")
    model.eval()
    alpha, beta = lc.weights_at(step)
    total_ce = total_raw = 0.0
    total_tokens = 0
    fidelities = []
    invalid = 0
    with torch.no_grad():
        for lo in range(0, len(pairs), batch_size):
            chunk = pairs[lo : lo + batch_size]
            src = pad_batch([p[0] for p in chunk], vocab.pad_id)
            tgt = pad_batch([p[1] for p in chunk], vocab.pad_id)
            logits = model(src, tgt[:, :-1])
            targets = tgt[:, 1:]
            n_tok = int((targets != vocab.pad_id).sum())
            total_ce += float(
                smoothed_ce(logits, targets, lc.eps_smooth, vocab.pad_id)
            ) * n_tok
            total_raw += float(
                smoothed_ce(logits, targets, 0.0, vocab.pad_id)
            ) * n_tok
            total_tokens += n_tok
            decoded = greedy_decode_batch(
                model, src, model.cfg.context_window,
                vocab.bos_id, vocab.eos_id, vocab.pad_id,
            )
            for ids, (_, _, source) in zip(decoded, chunk):
                try:
                    circuit = decode(TokenSequence(tuple(ids)), vocab)
                    fidelities.append(circuit_fidelity(source, circuit))
                except (DecodeError, DimensionError):
                    fidelities.append(0.0)
                    invalid += 1
    l_ce = total_ce / total_tokens
    ce_raw = total_raw / total_tokens
    mean_f = sum(fidelities) / len(fidelities)
    l_f = 1.0 - mean_f
    return EvalReport(
        grammar_accuracy=1.0 - invalid / len(pairs),
        mean_fidelity=mean_f,
        perplexity=math.exp(ce_raw),
        l_ce=l_ce,
        l_f=l_f,
        l_total=alpha * l_f + beta * l_ce,
        ce_unsmoothed=ce_raw,
        n_samples=len(pairs),
        n_invalid=invalid,
    )
