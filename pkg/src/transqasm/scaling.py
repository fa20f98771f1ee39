"""Token-count scaling measurements: mean encoded-sequence length as a
function of circuit depth or qubit count (expected linear), and the
growth of discrete-decomposition sequence length with achieved precision
(expected polylogarithmic, reported as a fitted exponent)."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .gates import gate_matrix
from .gatesets import GateSetConfig
from .randgen import RandomCircuitSpec, random_circuit
from .sk import NonDenseBasisWarning, SkConfig, sk_decompose
from .tokenizer import Vocabulary, encode

SCALING_CSV_FIELDS = (
    "axis", "n_qubits", "depth", "measured_tokens", "samples",
    "slope", "intercept", "r_squared",
)


@dataclass(frozen=True)
class TokenBudget:
    """Vocabulary-budget identity: per-gate token budget L = N_q + N_g +
    P_ang and total S = m * L.  This is a budget over the vocabulary, not
    the per-gate emission count (each emitted gate uses ~3-7 tokens)."""

    n_q: int
    n_g: int
    p_ang: int
    m: int

    @property
    def per_gate(self) -> int:
        return self.n_q + self.n_g + self.p_ang

    @property
    def total(self) -> int:
        return self.m * self.per_gate


@dataclass(frozen=True)
class ScalingRow:
    axis: str
    n_qubits: int
    depth: int
    measured_tokens: float
    samples: int
    slope: float
    intercept: float
    r_squared: float


def _linear_fit(xs, ys) -> tuple[float, float, float]:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    predicted = slope * xs + intercept
    ss_res = float(np.sum((ys - predicted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def measure_tokens(
    axis: str,
    fixed_value: int,
    sweep: list[int],
    gate_set: GateSetConfig,
    vocab: Vocabulary,
    samples: int = 30,
    seed: int = 0,
) -> list[ScalingRow]:
    """Mean encoded token count per sweep point with a shared linear fit.

    ``axis`` is "depth" (fixed qubit count) or "qubits" (fixed depth).
    Deterministic given seed.
    """
    if axis not in ("depth", "qubits"):
        raise ValueError(f"axis must be 'depth' or 'qubits', got {axis!r}")
    if not sweep:
        raise ValueError("sweep must be non-empty")
    means = []
    points = []
    for j, value in enumerate(sweep):
        n_qubits = fixed_value if axis == "depth" else value
        depth = value if axis == "depth" else fixed_value
        counts = []
        for i in range(samples):
            circuit = random_circuit(
                RandomCircuitSpec(
                    num_qubits=n_qubits, depth=depth,
                    seed=seed + j * samples + i,
                ),
                gate_set,
            )
            counts.append(len(encode(circuit, vocab)))
        means.append(sum(counts) / samples)
        points.append((n_qubits, depth))
    slope, intercept, r2 = _linear_fit(sweep, means)
    return [
        ScalingRow(
            axis=axis, n_qubits=nq, depth=d, measured_tokens=mean,
            samples=samples, slope=slope, intercept=intercept, r_squared=r2,
        )
        for (nq, d), mean in zip(points, means)
    ]


def scaling_rows_csv(rows: list[ScalingRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCALING_CSV_FIELDS)
    for row in rows:
        writer.writerow(
            [
                row.axis, row.n_qubits, row.depth,
                f"{row.measured_tokens:.6f}", row.samples,
                f"{row.slope:.6f}", f"{row.intercept:.6f}",
                f"{row.r_squared:.8f}",
            ]
        )
    return buf.getvalue()


@dataclass(frozen=True)
class SkGrowthRow:
    theta: float
    recursion_depth: int
    eps_achieved: float
    length: int


@dataclass(frozen=True)
class SkGrowthReport:
    rows: tuple[SkGrowthRow, ...]
    exponent: float
    exponent_stderr: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.exponent)


def measure_sk_growth(
    thetas: list[float],
    cfg: SkConfig,
    max_depth: int = 2,
) -> SkGrowthReport:
    """Decompose Rz(theta) targets at increasing recursion depth and fit
    length ~ a * log(1/eps)^c; the exponent c is reported with its
    standard error from the log-log regression."""
    rows = []
    for theta in thetas:
        u = gate_matrix("rz", (theta,))
        for depth in range(max_depth + 1):
            depth_cfg = SkConfig(
                basis=cfg.basis, base_length=cfg.base_length,
                recursion_depth=depth, eps_target=cfg.eps_target,
                cache_dir=cfg.cache_dir,
            )
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonDenseBasisWarning)
                result = sk_decompose(u, depth_cfg)
            rows.append(
                SkGrowthRow(
                    theta=theta, recursion_depth=depth,
                    eps_achieved=result.achieved_distance,
                    length=result.length,
                )
            )
    # regression over points with meaningful error and length
    xs, ys = [], []
    for row in rows:
        if row.eps_achieved > 1e-12 and row.length >= 1:
            xs.append(math.log(math.log(1.0 / row.eps_achieved)))
            ys.append(math.log(row.length))
    if len(xs) < 2 or max(xs) == min(xs):
        return SkGrowthReport(tuple(rows), float("nan"), float("nan"))
    slope, _, _ = _linear_fit(xs, ys)
    n = len(xs)
    xs_a, ys_a = np.array(xs), np.array(ys)
    pred = np.polyval(np.polyfit(xs_a, ys_a, 1), xs_a)
    dof = max(n - 2, 1)
    s_err = math.sqrt(float(np.sum((ys_a - pred) ** 2)) / dof)
    sxx = float(np.sum((xs_a - xs_a.mean()) ** 2))
    stderr = s_err / math.sqrt(sxx) if sxx > 0 else float("nan")
    return SkGrowthReport(tuple(rows), slope, stderr)
