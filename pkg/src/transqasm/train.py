"""Training loop: adaptive-moment optimizer with linear warmup and
inverse-square-root decay, deterministic batching given a seed, per-step
loss trace (CSV), periodic held-out evaluation, and checkpointing."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .checkpoint import save_checkpoint
from .evaluate import EvalReport, evaluate, pad_batch
from .losses import LossConfig, composite_loss
from .model import TranspilerModel
from .qasm import Circuit, parse
from .tokenizer import TokenSequence, Vocabulary, encode

TRACE_FIELDS = ("step", "L", "L_CE", "L_F", "lr", "alpha", "beta")


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 1000
    batch_size: int = 32
    lr_base: float = 3e-4
    warmup_steps: int = 4000
    seed: int = 0
    holdout_frac: float = 0.1
    eval_every: int = 0  # 0 disables periodic eval; final eval always runs
    checkpoint_every: int = 0
    grad_clip: float = 1.0

    def lr_at(self, step: int) -> float:
        s = max(step, 1)
        return self.lr_base * min(s / self.warmup_steps,
                                  (self.warmup_steps / s) ** 0.5)


@dataclass
class TrainResult:
    model: TranspilerModel
    trace: list[dict]
    final_eval: EvalReport
    eval_history: list[tuple[int, EvalReport]] = field(default_factory=list)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TRACE_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.trace)
        return buf.getvalue()


def prepare_pairs(
    records, vocab: Vocabulary
) -> list[tuple[tuple[int, ...], tuple[int, ...], Circuit]]:
    """Encode dataset records into (src ids, tgt ids, source circuit)."""
    out = []
    for record in records:
        source = parse(record.source_qasm)
        target = parse(record.target_qasm)
        out.append(
            (encode(source, vocab).ids, encode(target, vocab).ids, source)
        )
    return out


def split_holdout(pairs, frac: float, seed: int):
    """Deterministic train/held-out split; held-out is at least 1 pair
    when frac > 0."""
    if not 0.0 <= frac < 1.0:
        raise ValueError("holdout_frac must be in [0, 1)")
    if frac == 0.0:
        return list(pairs), list(pairs)  # evaluate on the training set
    order = np.random.default_rng(seed).permutation(len(pairs))
    n_hold = max(1, int(len(pairs) * frac))
    hold = [pairs[i] for i in order[:n_hold]]
    train = [pairs[i] for i in order[n_hold:]]
    if not train:
        raise ValueError("holdout fraction leaves no training data")
    return train, hold


def train(
    pairs,
    model: TranspilerModel,
    vocab: Vocabulary,
    lc: LossConfig,
    tc: TrainConfig,
    out_dir: str | Path | None = None,
) -> TrainResult:
    """``pairs`` as produced by prepare_pairs.  Deterministic given
    tc.seed (fixed init is the caller's via build_model; fixed batch
    order and dropout stream are set here)."""
    if not pairs:
        raise ValueError("empty dataset")
    window = model.cfg.context_window
    for src_ids, tgt_ids, _ in pairs:
        if len(src_ids) > window or len(tgt_ids) > window:
            raise ValueError("sequence exceeds context window")
    train_pairs, hold_pairs = split_holdout(pairs, tc.holdout_frac, tc.seed)

    torch.manual_seed(tc.seed)
    rng = np.random.default_rng(tc.seed)
    optimizer = torch.optim.Adam(
        model.parameters(), lr=tc.lr_base, betas=(0.9, 0.98), eps=1e-9
    )
    out_dir = Path(out_dir) if out_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    trace: list[dict] = []
    eval_history: list[tuple[int, EvalReport]] = []
    order: list[int] = []
    needs_alpha = any(a > 0 for _, a, _ in lc.schedule)

    for step in range(1, tc.steps + 1):
        if len(order) < tc.batch_size:
            order.extend(rng.permutation(len(train_pairs)))
        batch_idx = [order.pop(0) for _ in range(min(tc.batch_size, len(order)))]
        chunk = [train_pairs[i] for i in batch_idx]
        src = pad_batch([p[0] for p in chunk], vocab.pad_id)
        tgt = pad_batch([p[1] for p in chunk], vocab.pad_id)
        sources = [p[2] for p in chunk] if needs_alpha else None

        model.train()
        lr = tc.lr_at(step)
        for group in optimizer.param_groups:
            group["lr"] = lr
        optimizer.zero_grad()
        loss, l_ce, l_f = composite_loss(model, src, tgt, sources, lc, step, vocab)
        if not torch.isfinite(loss):
            raise DivergenceError(f"non-finite loss at step {step}")
        loss.backward()
        if tc.grad_clip > 0:
            torch.nn.utils.clip_grad_norm_(model.parameters(), tc.grad_clip)
        optimizer.step()

        alpha, beta = lc.weights_at(step)
        trace.append(
            {
                "step": step,
                "L": float(loss.detach()),
                "L_CE": float(l_ce.detach()),
                "L_F": float(l_f.detach()),
                "lr": lr,
                "alpha": alpha,
                "beta": beta,
            }
        )
        if tc.eval_every and step % tc.eval_every == 0 and step < tc.steps:
            report = evaluate(model, hold_pairs, vocab, lc, step)
            eval_history.append((step, report))
            if out_dir is not None:
                (out_dir / f"eval-{step:07d}.json").write_text(
                    report.to_json() + "\n"
                )
        if (
            out_dir is not None
            and tc.checkpoint_every
            and step % tc.checkpoint_every == 0
        ):
            save_checkpoint(
                model, out_dir / f"ckpt-{step:07d}", vocab.content_hash(), step
            )

    final_eval = evaluate(model, hold_pairs, vocab, lc, tc.steps)
    eval_history.append((tc.steps, final_eval))
    result = TrainResult(
        model=model, trace=trace, final_eval=final_eval,
        eval_history=eval_history,
    )
    if out_dir is not None:
        (out_dir / "trace.csv").write_text(result.trace_csv())
        (out_dir / "eval-final.json").write_text(final_eval.to_json() + "\n")
        save_checkpoint(model, out_dir / "ckpt-final", vocab.content_hash(),
                        tc.steps)
    return result
