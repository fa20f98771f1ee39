"""Autoregressive decoding strategies: greedy, temperature sampling,
top-k, and top-p (nucleus) sampling."""

from __future__ import annotations

from dataclasses import dataclass

import torch

STRATEGIES = ("greedy", "temperature", "top_k", "top_p")


class DecodeConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DecodeConfig:
    strategy: str = "greedy"
    temperature: float = 1.0
    top_k: int = 1
    top_p: float = 1.0
    max_len: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise DecodeConfigError(f"unknown strategy {self.strategy!r}")
        if self.temperature <= 0:
            raise DecodeConfigError("temperature must be > 0")
        if self.top_k < 1:
            raise DecodeConfigError("top_k must be >= 1")
        if not 0.0 < self.top_p <= 1.0:
            raise DecodeConfigError("top_p must be in (0, 1]")
        if self.max_len < 2:
            raise DecodeConfigError("max_len must be >= 2")


def _pick_next(logits: torch.Tensor, dc: DecodeConfig, generator) -> int:
    if dc.strategy == "greedy":
        return int(torch.argmax(logits))
    probs = torch.softmax(logits / dc.temperature, dim=-1)
    if dc.strategy == "temperature":
        pass
    elif dc.strategy == "top_k":
        top = torch.topk(probs, min(dc.top_k, probs.shape[-1]))
        filtered = torch.zeros_like(probs)
        filtered[top.indices] = top.values
        probs = filtered / filtered.sum()
    elif dc.strategy == "top_p":
        sorted_probs, sorted_idx = torch.sort(probs, descending=True)
        cumulative = torch.cumsum(sorted_probs, dim=-1)
        # minimal prefix whose cumulative mass reaches top_p
        cutoff = int(torch.searchsorted(cumulative, dc.top_p)) + 1
        filtered = torch.zeros_like(probs)
        keep = sorted_idx[:cutoff]
        filtered[keep] = probs[keep]
        probs = filtered / filtered.sum()
    return int(torch.multinomial(probs, 1, generator=generator))


def decode_sequence(
    model,
    src_ids: tuple[int, ...],
    dc: DecodeConfig,
    bos_id: int,
    eos_id: int,
    generator: torch.Generator | None = None,
) -> tuple[int, ...]:
    """Decode one source sequence; stops at <EOS> or max_len tokens."""
    if generator is None and dc.strategy != "greedy":
        generator = torch.Generator().manual_seed(dc.seed)
    model.eval()
    src = torch.tensor([src_ids], dtype=torch.long)
    out = [bos_id]
    with torch.no_grad():
        memory = model.encode(src)
        for _ in range(dc.max_len - 1):
            tgt = torch.tensor([out], dtype=torch.long)
            hidden = model.decode(memory, src, tgt)
            logits = hidden[0, -1] @ model.tgt_embed.weight.T + model.output_bias
            nxt = _pick_next(logits, dc, generator)
            out.append(nxt)
            if nxt == eos_id:
                break
    return tuple(out)


def greedy_decode_batch(
    model,
    src: torch.Tensor,
    max_len: int,
    bos_id: int,
    eos_id: int,
    pad_id: int,
) -> list[tuple[int, ...]]:
    """Batched greedy decoding; finished rows are padded until all rows
    emit <EOS> or max_len is reached."""
    model.eval()
    batch = src.shape[0]
    with torch.no_grad():
        memory = model.encode(src)
        out = torch.full((batch, 1), bos_id, dtype=torch.long)
        finished = torch.zeros(batch, dtype=torch.bool)
        for _ in range(max_len - 1):
            hidden = model.decode(memory, src, out)
            logits = hidden[:, -1] @ model.tgt_embed.weight.T + model.output_bias
            nxt = logits.argmax(dim=-1)
            nxt = torch.where(finished, torch.full_like(nxt, pad_id), nxt)
            out = torch.cat([out, nxt.unsqueeze(1)], dim=1)
            finished |= nxt == eos_id
            if bool(finished.all()):
                break
    sequences = []
    for row in out.tolist():
        if eos_id in row:
            row = row[: row.index(eos_id) + 1]
        sequences.append(tuple(row))
    return sequences
