"""Training objectives: label-smoothed cross-entropy, the composite
token/fidelity loss, and the (alpha, beta) weighting schedule.

The fidelity term is not differentiable through discrete decoding, so its
gradient uses a sequence-level score-function surrogate: the negative
log-likelihood of each greedily decoded sequence, scaled by (1 - F).  The
returned loss *value* is exactly alpha * L_F + beta * L_CE; the surrogate
only supplies the gradient path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from .decoding import greedy_decode_batch
from .qasm import QasmParseError
from .sim import DimensionError, circuit_fidelity
from .tokenizer import DecodeError, TokenSequence, Vocabulary, decode


class LossConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LossConfig:
    eps_smooth: float = 0.1
    # (step, alpha, beta) breakpoints; weights between breakpoints are
    # linearly interpolated, and clamped outside the listed range
    schedule: tuple[tuple[int, float, float], ...] = ((0, 0.0, 1.0),)

    def __post_init__(self):
        if not 0.0 <= self.eps_smooth < 1.0:
            raise LossConfigError("eps_smooth must be in [0, 1)")
        if not self.schedule:
            raise LossConfigError("schedule must have at least one breakpoint")
        steps = [s for s, _, _ in self.schedule]
        if steps != sorted(steps) or len(set(steps)) != len(steps):
            raise LossConfigError("schedule steps must be strictly increasing")
        for step, alpha, beta in self.schedule:
            if alpha < 0 or beta < 0 or alpha + beta <= 0:
                raise LossConfigError(
                    f"need alpha, beta >= 0 and alpha + beta > 0 at step {step}"
                )

    def weights_at(self, step: int) -> tuple[float, float]:
        points = self.schedule
        if step <= points[0][0]:
            return points[0][1], points[0][2]
        if step >= points[-1][0]:
            return points[-1][1], points[-1][2]
        for (s0, a0, b0), (s1, a1, b1) in zip(points, points[1:]):
            if s0 <= step <= s1:
                t = (step - s0) / (s1 - s0)
                return a0 + t * (a1 - a0), b0 + t * (b1 - b0)
        raise AssertionError("unreachable")


def ramp_schedule(
    total_steps: int, alpha_final: float = 0.5, hold_frac: float = 0.3
) -> tuple[tuple[int, float, float], ...]:
    """Grammar-first default: pure CE for the first ``hold_frac`` of
    training, then a linear ramp of the fidelity weight."""
    hold = max(1, int(total_steps * hold_frac))
    return ((0, 0.0, 1.0), (hold, 0.0, 1.0), (total_steps, alpha_final, 1.0))


def smoothed_ce_floor(eps_smooth: float, vocab_size: int) -> float:
    """Entropy of the smoothed target distribution: the exact lower bound
    of smoothed_ce, attained by a perfect predictor."""
    if eps_smooth == 0.0:
        return 0.0
    v = vocab_size
    return -(
        (1 - eps_smooth) * math.log(1 - eps_smooth)
        + eps_smooth * math.log(eps_smooth / (v - 1))
    )


def smoothed_ce(
    logits: torch.Tensor,
    targets: torch.Tensor,
    eps_smooth: float,
    pad_id: int = 0,
) -> torch.Tensor:
    """Mean cross-entropy against the smoothed distribution that puts
    1 - eps on the true class and eps / (V - 1) on every other class.
    <PAD> target positions are excluded from the mean."""
    if logits.shape[:-1] != targets.shape:
        raise ValueError(
            f"logits {tuple(logits.shape)} do not match targets "
            f"{tuple(targets.shape)}"
        )
    v = logits.shape[-1]
    log_probs = torch.log_softmax(logits, dim=-1)
    nll_true = -log_probs.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    mask = targets != pad_id
    if not mask.any():
        raise ValueError("batch contains only padding")
    if eps_smooth == 0.0:
        per_token = nll_true
    else:
        off_mass = eps_smooth / (v - 1)
        nll_rest = -(log_probs.sum(dim=-1) + nll_true)  # sum over non-true classes
        per_token = (1 - eps_smooth) * nll_true + off_mass * nll_rest
    return per_token[mask].mean()


def sequence_nll(
    logits: torch.Tensor, targets: torch.Tensor, pad_id: int = 0
) -> torch.Tensor:
    """Per-sequence summed negative log-likelihood, shape (batch,)."""
    log_probs = torch.log_softmax(logits, dim=-1)
    nll = -log_probs.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    return (nll * (targets != pad_id)).sum(dim=1)


def _decoded_fidelity(ids: tuple[int, ...], source, vocab: Vocabulary) -> float:
    try:
        circuit = decode(TokenSequence(tuple(ids)), vocab)
        return circuit_fidelity(source, circuit)
    except (DecodeError, DimensionError, QasmParseError):
        return 0.0


def composite_loss(
    model,
    src: torch.Tensor,
    tgt: torch.Tensor,
    source_circuits,
    lc: LossConfig,
    step: int,
    vocab: Vocabulary,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Returns (L, L_CE, L_F) for a padded batch.

    ``tgt`` holds full target sequences (<BOS> ... <EOS>); teacher forcing
    shifts them internally.  ``source_circuits`` are the parsed source
    circuits used for the fidelity of decoded outputs; pass None to skip
    the fidelity term entirely when alpha is 0 at this step.
    """
    if src.shape[0] == 0:
        raise ValueError("empty batch")
    alpha, beta = lc.weights_at(step)
    logits = model(src, tgt[:, :-1])
    l_ce = smoothed_ce(logits, tgt[:, 1:], lc.eps_smooth, pad_id=model.pad_id)

    if alpha == 0.0:
        zero = torch.zeros((), dtype=l_ce.dtype)
        return beta * l_ce, l_ce, zero

    if source_circuits is None:
        raise ValueError("source_circuits required when alpha > 0")
    with torch.no_grad():
        decoded = greedy_decode_batch(
            model, src, max_len=model.cfg.context_window,
            bos_id=vocab.bos_id, eos_id=vocab.eos_id, pad_id=vocab.pad_id,
        )
    deficits = torch.tensor(
        [1.0 - _decoded_fidelity(ids, c, vocab) for ids, c in
         zip(decoded, source_circuits)],
        dtype=torch.float32,
    )
    l_f = deficits.mean()

    max_len = max(len(ids) for ids in decoded)
    dec_batch = torch.full(
        (len(decoded), max(max_len, 2)), vocab.pad_id, dtype=torch.long
    )
    for i, ids in enumerate(decoded):
        dec_batch[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
    dec_logits = model(src, dec_batch[:, :-1])
    nll = sequence_nll(dec_logits, dec_batch[:, 1:], pad_id=vocab.pad_id)
    surrogate = (deficits * nll).mean()

    # value alpha*L_F + beta*L_CE; gradient alpha*grad(surrogate) + beta*grad(CE)
    l = alpha * (l_f + surrogate - surrogate.detach()) + beta * l_ce
    return l, l_ce, l_f
