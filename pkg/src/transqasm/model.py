"""Encoder-decoder transformer over circuit token sequences.

Post-layer-norm blocks: each residual sum is normalized, and each stack
ends with a final layer norm.  Source and target vocabularies share one
token inventory but use separate embedding tables; the output projection
is weight-tied to the target embedding and adds a per-token bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
from torch import nn


class ModelConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    d_ff: int = 128
    n_heads: int = 4
    n_layers_enc: int = 2
    n_layers_dec: int = 2
    context_window: int = 256
    dropout: float = 0.0

    def __post_init__(self):
        if self.d_model % self.n_heads != 0:
            raise ModelConfigError("d_model must be divisible by n_heads")
        if self.context_window < 8:
            raise ModelConfigError("context_window must be >= 8")
        if self.vocab_size < 2:
            raise ModelConfigError("vocab_size must be >= 2")
        if not 0.0 <= self.dropout < 1.0:
            raise ModelConfigError("dropout must be in [0, 1)")

    @property
    def d_k(self) -> int:
        return self.d_model // self.n_heads

    def to_dict(self) -> dict:
        return {
            "vocab_size": self.vocab_size,
            "d_model": self.d_model,
            "d_ff": self.d_ff,
            "n_heads": self.n_heads,
            "n_layers_enc": self.n_layers_enc,
            "n_layers_dec": self.n_layers_dec,
            "context_window": self.context_window,
            "dropout": self.dropout,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**data)


def toy_preset(vocab_size: int) -> ModelConfig:
    return ModelConfig(
        vocab_size=vocab_size,
        d_model=64,
        d_ff=128,
        n_heads=4,
        n_layers_enc=2,
        n_layers_dec=2,
        context_window=256,
        dropout=0.0,
    )


def reference_preset(vocab_size: int = 3) -> ModelConfig:
    """Full-size configuration (the published parameter inventory is
    reproduced at the default vocab_size)."""
    return ModelConfig(
        vocab_size=vocab_size,
        d_model=768,
        d_ff=2048,
        n_heads=8,
        n_layers_enc=6,
        n_layers_dec=6,
        context_window=768,
        dropout=0.1,
    )


def sinusoidal_positions(length: int, d_model: int) -> torch.Tensor:
    position = torch.arange(length, dtype=torch.float64).unsqueeze(1)
    div = torch.exp(
        torch.arange(0, d_model, 2, dtype=torch.float64)
        * (-math.log(10000.0) / d_model)
    )
    pe = torch.zeros(length, d_model, dtype=torch.float64)
    pe[:, 0::2] = torch.sin(position * div)
    pe[:, 1::2] = torch.cos(position * div)
    return pe


class MultiHeadAttention(nn.Module):
    def __init__(self, d_model: int, n_heads: int, dropout: float):
        super().__init__()
        self.n_heads = n_heads
        self.d_k = d_model // n_heads
        self.w_q = nn.Linear(d_model, d_model)
        self.w_k = nn.Linear(d_model, d_model)
        self.w_v = nn.Linear(d_model, d_model)
        self.w_o = nn.Linear(d_model, d_model)
        self.dropout = nn.Dropout(dropout)
        self.last_weights: torch.Tensor | None = None

    def forward(self, query, key, value, mask=None):
        b, lq, _ = query.shape
        lk = key.shape[1]

        def split(x, proj, length):
            return proj(x).view(b, length, self.n_heads, self.d_k).transpose(1, 2)

        q = split(query, self.w_q, lq)
        k = split(key, self.w_k, lk)
        v = split(value, self.w_v, lk)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_k)
        if mask is not None:
            scores = scores.masked_fill(~mask, float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        self.last_weights = weights.detach()
        out = self.dropout(weights) @ v
        out = out.transpose(1, 2).contiguous().view(b, lq, -1)
        return self.w_o(out)


class FeedForward(nn.Module):
    def __init__(self, d_model: int, d_ff: int, dropout: float):
        super().__init__()
        self.lin1 = nn.Linear(d_model, d_ff)
        self.lin2 = nn.Linear(d_ff, d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x):
        return self.lin2(self.dropout(torch.relu(self.lin1(x))))


class EncoderLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.self_attn = MultiHeadAttention(cfg.d_model, cfg.n_heads, cfg.dropout)
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.ffn = FeedForward(cfg.d_model, cfg.d_ff, cfg.dropout)
        self.norm2 = nn.LayerNorm(cfg.d_model)
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, x, src_mask):
        x = self.norm1(x + self.dropout(self.self_attn(x, x, x, src_mask)))
        return self.norm2(x + self.dropout(self.ffn(x)))


class DecoderLayer(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.self_attn = MultiHeadAttention(cfg.d_model, cfg.n_heads, cfg.dropout)
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.cross_attn = MultiHeadAttention(cfg.d_model, cfg.n_heads, cfg.dropout)
        self.norm2 = nn.LayerNorm(cfg.d_model)
        self.ffn = FeedForward(cfg.d_model, cfg.d_ff, cfg.dropout)
        self.norm3 = nn.LayerNorm(cfg.d_model)
        self.dropout = nn.Dropout(cfg.dropout)

    def forward(self, x, memory, tgt_mask, memory_mask):
        x = self.norm1(x + self.dropout(self.self_attn(x, x, x, tgt_mask)))
        x = self.norm2(
            x + self.dropout(self.cross_attn(x, memory, memory, memory_mask))
        )
        return self.norm3(x + self.dropout(self.ffn(x)))


class TranspilerModel(nn.Module):
    """Sequence-to-sequence model mapping source token ids to target
    logits under teacher forcing."""

    def __init__(self, cfg: ModelConfig, pad_id: int = 0):
        super().__init__()
        self.cfg = cfg
        self.pad_id = pad_id
        self.src_embed = nn.Embedding(cfg.vocab_size, cfg.d_model)
        self.tgt_embed = nn.Embedding(cfg.vocab_size, cfg.d_model)
        self.register_buffer(
            "pos_encoding",
            sinusoidal_positions(cfg.context_window, cfg.d_model).to(torch.float32),
            persistent=False,
        )
        self.encoder_layers = nn.ModuleList(
            EncoderLayer(cfg) for _ in range(cfg.n_layers_enc)
        )
        self.encoder_norm = nn.LayerNorm(cfg.d_model)
        self.decoder_layers = nn.ModuleList(
            DecoderLayer(cfg) for _ in range(cfg.n_layers_dec)
        )
        self.decoder_norm = nn.LayerNorm(cfg.d_model)
        self.output_bias = nn.Parameter(torch.zeros(cfg.vocab_size))
        self.embed_dropout = nn.Dropout(cfg.dropout)

    def _embed(self, ids: torch.Tensor, table: nn.Embedding) -> torch.Tensor:
        if ids.shape[1] > self.cfg.context_window:
            raise ValueError(
                f"sequence length {ids.shape[1]} exceeds context window "
                f"{self.cfg.context_window}"
            )
        scale = math.sqrt(self.cfg.d_model)
        x = table(ids) * scale + self.pos_encoding[: ids.shape[1]].to(ids.device)
        return self.embed_dropout(x)

    def _src_mask(self, src: torch.Tensor) -> torch.Tensor:
        # (B, 1, 1, Ls) keep-mask over keys
        return (src != self.pad_id)[:, None, None, :]

    def _tgt_mask(self, tgt: torch.Tensor) -> torch.Tensor:
        lt = tgt.shape[1]
        causal = torch.tril(
            torch.ones(lt, lt, dtype=torch.bool, device=tgt.device)
        )
        pad = (tgt != self.pad_id)[:, None, None, :]
        return causal[None, None, :, :] & pad

    def encode(self, src: torch.Tensor) -> torch.Tensor:
        mask = self._src_mask(src)
        x = self._embed(src, self.src_embed)
        for layer in self.encoder_layers:
            x = layer(x, mask)
        return self.encoder_norm(x)

    def decode(
        self, memory: torch.Tensor, src: torch.Tensor, tgt: torch.Tensor
    ) -> torch.Tensor:
        x = self._embed(tgt, self.tgt_embed)
        tgt_mask = self._tgt_mask(tgt)
        mem_mask = self._src_mask(src)
        for layer in self.decoder_layers:
            x = layer(x, memory, tgt_mask, mem_mask)
        return self.decoder_norm(x)

    def forward(self, src: torch.Tensor, tgt_prefix: torch.Tensor) -> torch.Tensor:
        """Logits of shape (batch, len(tgt_prefix), vocab_size)."""
        memory = self.encode(src)
        hidden = self.decode(memory, src, tgt_prefix)
        return hidden @ self.tgt_embed.weight.T + self.output_bias

    def param_count(self) -> int:
        return sum(p.numel() for p in self.parameters() if p.requires_grad)


def build_model(cfg: ModelConfig, pad_id: int = 0, seed: int = 0) -> TranspilerModel:
    """Deterministically initialized model (fan-based uniform init via the
    framework defaults under a fixed seed)."""
    torch.manual_seed(seed)
    return TranspilerModel(cfg, pad_id=pad_id)
