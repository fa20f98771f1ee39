"""Acceptance gate: every top-level requirement as one test with one
pass/fail line.  Run with ``pytest tests/test_acceptance.py -v`` (add -s
to see the [PASS]/[FAIL] detail lines).

The two training tests retrain from scratch and dominate the runtime
(roughly half an hour on a desktop CPU); everything else finishes in
about a minute.
"""

import math
import sys
import time
import warnings

import numpy as np
import pytest
import torch

from transqasm.dataset import build_dataset, load_pairs
from transqasm.gates import gate_matrix
from transqasm.gatesets import EAGLE, HERON, IONQ, transpile_rules
from transqasm.losses import LossConfig, smoothed_ce, smoothed_ce_floor
from transqasm.model import build_model, reference_preset, toy_preset
from transqasm.randgen import RandomCircuitSpec, random_circuit
from transqasm.scaling import measure_sk_growth, measure_tokens, scaling_rows_csv
from transqasm.sim import circuit_fidelity, fidelity
from transqasm.sk import (
    NonDenseBasisWarning,
    SkConfig,
    basic_approx,
    compose_sequence,
    distance,
    sk_decompose,
)
from transqasm.tokenizer import TWO_PI, AngleBinner, build_vocabulary, encode
from transqasm.train import TrainConfig, prepare_pairs, train

from conftest import random_unitary
from test_sk import brute_force_best_distance

VOCAB = build_vocabulary()


def _verdict(name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail}", file=sys.stderr)
    assert ok, f"{name}: {detail}"


def _train_run(n_qubits, target, seed, steps, tmp_path, tag):
    path = tmp_path / f"{tag}.jsonl"
    build_dataset(
        1000, RandomCircuitSpec(num_qubits=n_qubits, depth=4, seed=seed),
        EAGLE, target, 256, path,
    )
    pairs = prepare_pairs(load_pairs(path), VOCAB)
    model = build_model(toy_preset(VOCAB.size), seed=0)
    result = train(
        pairs, model, VOCAB, LossConfig(eps_smooth=0.02),
        TrainConfig(
            steps=steps, batch_size=64, holdout_frac=0.1, warmup_steps=2000
        ),
    )
    return result.final_eval


class TestAcceptance:
    def test_tokenizer_fixture(self):
        start = time.perf_counter()
        binner = AngleBinner()
        worked = binner.bin(3.19) == 64 and abs(binner.unbin(64) - math.pi) < 1e-12
        from transqasm.qasm import parse

        circuit = parse(
            'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\nrz(3.19) q[0];\n'
        )
        token_ok = "PARAM_64" in [
            VOCAB.token(i) for i in encode(circuit, VOCAB).ids
        ]
        rng = np.random.default_rng(0)
        max_err = 0.0
        for theta in rng.uniform(-100, 100, size=10_000):
            norm = round(float(theta), 2) % TWO_PI
            max_err = max(max_err, abs(norm - binner.unbin(binner.bin(theta))))
        elapsed = time.perf_counter() - start
        _verdict(
            "tokenizer fixture",
            worked and token_ok and max_err < TWO_PI / 128 and elapsed < 1.0,
            f"rz(3.19)->64->pi ok={worked and token_ok}, max angle err "
            f"{max_err:.5f} < {TWO_PI / 128:.5f}, {elapsed:.2f}s < 1s",
        )

    def test_oracle_soundness(self):
        start = time.perf_counter()
        rng = np.random.default_rng(0)
        worst = 1.0
        pairs = 0
        for n in range(1, 6):
            for i in range(1000):
                depth = int(rng.integers(1, 21))
                circuit = random_circuit(
                    RandomCircuitSpec(num_qubits=n, depth=depth, seed=10_000 * n + i),
                    EAGLE,
                )
                for target in (IONQ, HERON):
                    worst = min(
                        worst, circuit_fidelity(circuit, transpile_rules(circuit, target))
                    )
                    pairs += 1
        elapsed = time.perf_counter() - start
        _verdict(
            "oracle soundness",
            worst >= 1 - 1e-9 and elapsed < 120,
            f"{pairs} pairs, worst fidelity {worst:.12f} >= 1-1e-9, "
            f"{elapsed:.1f}s < 120s",
        )

    def test_fidelity_functional(self):
        rng = np.random.default_rng(1)
        errs = []
        for _ in range(100):
            theta, delta = rng.uniform(0, TWO_PI, size=2)
            f = fidelity(
                gate_matrix("rz", (theta,)), gate_matrix("rz", (theta + delta,))
            ).fidelity
            errs.append(abs(f - math.cos(delta / 2) ** 2))
        u = random_unitary(4, rng)
        self_ok = abs(fidelity(u, u).fidelity - 1.0) < 1e-10
        ortho_ok = abs(fidelity(np.eye(2, dtype=complex), gate_matrix("x")).fidelity) < 1e-10
        _verdict(
            "fidelity functional",
            self_ok and ortho_ok and max(errs) < 1e-10,
            f"F(U,U)=1 {self_ok}, F(I,X)=0 {ortho_ok}, "
            f"max |F - cos^2(d/2)| = {max(errs):.2e} < 1e-10",
        )

    def test_gradient_check(self):
        start = time.perf_counter()
        model = build_model(toy_preset(VOCAB.size), seed=5).double()
        src = torch.tensor([[1, 2, 3, 4, 5, 6]])
        tgt = torch.tensor([[1, 7, 8, 9, 10, 2]])

        def loss_fn():
            return smoothed_ce(model(src, tgt[:, :-1]), tgt[:, 1:], 0.1)

        loss_fn().backward()
        rng = np.random.default_rng(0)
        h = 1e-6
        worst = 0.0
        for name, param in model.named_parameters():
            flat = param.detach().view(-1)
            grad = param.grad.view(-1)
            for i in rng.choice(flat.numel(), size=min(5, flat.numel()), replace=False):
                orig = float(flat[i])
                with torch.no_grad():
                    flat[i] = orig + h
                    up = float(loss_fn())
                    flat[i] = orig - h
                    down = float(loss_fn())
                    flat[i] = orig
                numeric = (up - down) / (2 * h)
                analytic = float(grad[i])
                # atol floor 1e-8 sits above the central-difference noise
                # floor (machine eps * loss / h ~ 1e-9); entries with
                # gradients under it cannot support a pure relative check
                denom = max(abs(numeric), abs(analytic), 1e-12)
                worst = max(
                    worst,
                    (abs(numeric - analytic) - 1e-8) / denom,
                )
        elapsed = time.perf_counter() - start
        _verdict(
            "gradient check",
            worst < 1e-4 and elapsed < 60,
            f"worst relative error {worst:.2e} < 1e-4 (atol 1e-8) over every "
            f"parameter tensor, {elapsed:.1f}s < 60s",
        )

    def test_smoothed_ce_floor_and_perplexity(self):
        v, eps = 11, 0.1
        dist = torch.full((v,), eps / (v - 1), dtype=torch.float64)
        dist[3] = 1 - eps
        perfect = float(
            smoothed_ce(torch.log(dist)[None, None, :], torch.tensor([[3]]), eps)
        )
        floor = smoothed_ce_floor(eps, v)
        floor_ok = abs(perfect - floor) < 1e-9

        from transqasm.evaluate import evaluate

        model = build_model(toy_preset(VOCAB.size), seed=2)
        # small fixed eval set
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "p.jsonl"
            build_dataset(
                8, RandomCircuitSpec(num_qubits=1, depth=2, seed=0),
                EAGLE, IONQ, 256, path,
            )
            pairs = prepare_pairs(load_pairs(path), VOCAB)
        report = evaluate(model, pairs, VOCAB, LossConfig())
        ppl_ok = abs(report.perplexity - math.exp(report.ce_unsmoothed)) < 1e-9
        with torch.no_grad():
            for p in model.parameters():
                p.zero_()
        uniform = evaluate(model, pairs, VOCAB, LossConfig(eps_smooth=0.0))
        uniform_ok = abs(uniform.perplexity - VOCAB.size) < 1e-6 * VOCAB.size
        _verdict(
            "smoothed-CE floor and perplexity identities",
            floor_ok and ppl_ok and uniform_ok,
            f"|CE - floor| = {abs(perfect - floor):.1e} < 1e-9, "
            f"perplexity identity {ppl_ok}, uniform perplexity "
            f"{uniform.perplexity:.3f} = V = {VOCAB.size}",
        )

    def test_desk_scale_training_one_qubit(self, tmp_path):
        start = time.perf_counter()
        report = _train_run(1, IONQ, 11, 10_000, tmp_path, "1q")
        elapsed = time.perf_counter() - start
        _verdict(
            "desk-scale training (1-qubit Eagle->IonQ)",
            report.grammar_accuracy >= 0.95
            and report.mean_fidelity >= 0.90
            and elapsed < 3600,
            f"grammar {report.grammar_accuracy:.3f} >= 0.95, fidelity "
            f"{report.mean_fidelity:.3f} >= 0.90, {elapsed / 60:.1f}min < 60min",
        )

    def test_desk_scale_training_two_qubit(self, tmp_path):
        start = time.perf_counter()
        report = _train_run(2, HERON, 13, 4_000, tmp_path, "2q")
        elapsed = time.perf_counter() - start
        _verdict(
            "desk-scale training (2-qubit Eagle->Heron)",
            report.grammar_accuracy >= 0.90 and elapsed < 3600,
            f"grammar {report.grammar_accuracy:.3f} >= 0.90 "
            f"(fidelity {report.mean_fidelity:.3f}), "
            f"{elapsed / 60:.1f}min < 60min",
        )

    def test_memorization(self, tmp_path):
        start = time.perf_counter()
        path = tmp_path / "mem.jsonl"
        build_dataset(
            16, RandomCircuitSpec(num_qubits=1, depth=4, seed=3),
            EAGLE, IONQ, 256, path,
        )
        pairs = prepare_pairs(load_pairs(path), VOCAB)
        model = build_model(toy_preset(VOCAB.size), seed=0)
        result = train(
            pairs, model, VOCAB, LossConfig(),
            TrainConfig(
                steps=1500, batch_size=16, holdout_frac=0.0, warmup_steps=400
            ),
        )
        elapsed = time.perf_counter() - start
        report = result.final_eval
        _verdict(
            "memorization smoke test",
            report.grammar_accuracy == 1.0
            and report.mean_fidelity >= 0.99
            and elapsed < 300,
            f"grammar {report.grammar_accuracy:.3f} = 1.0, fidelity "
            f"{report.mean_fidelity:.4f} >= 0.99 in 1500 steps (<= 3000), "
            f"{elapsed:.0f}s < 300s",
        )

    def test_parameter_inventory(self):
        count = build_model(reference_preset()).param_count()
        _verdict(
            "parameter inventory",
            count == 80_358_915,
            f"reference preset has {count:,} trainable parameters "
            f"(expected 80,358,915)",
        )

    def test_scaling_bench(self):
        start = time.perf_counter()
        depth_rows = measure_tokens(
            "depth", 3, list(range(1, 21)), EAGLE, VOCAB, samples=30, seed=0
        )
        qubit_rows = measure_tokens(
            "qubits", 10, [1, 2, 3, 4, 5], EAGLE, VOCAB, samples=30, seed=1
        )
        elapsed = time.perf_counter() - start
        r2_depth = depth_rows[0].r_squared
        r2_qubits = qubit_rows[0].r_squared
        _verdict(
            "scaling bench",
            r2_depth >= 0.99 and r2_qubits >= 0.99 and elapsed < 60,
            f"R^2 depth {r2_depth:.5f} >= 0.99, R^2 qubits {r2_qubits:.5f} "
            f">= 0.99, {elapsed:.1f}s < 60s",
        )

    def test_solovay_kitaev(self):
        u = gate_matrix("rz", (math.pi / 8,))
        dists = []
        for depth in range(3):
            cfg = SkConfig(base_length=12, recursion_depth=depth, eps_target=1e-3)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonDenseBasisWarning)
                dists.append(sk_decompose(u, cfg).achieved_distance)
        start = time.perf_counter()  # runtime budget counts after net build
        monotone = dists[0] >= dists[1] >= dists[2]
        final_ok = dists[2] <= 0.15

        rng = np.random.default_rng(7)
        brute_ok = True
        for length in (6, 8):
            cfg = SkConfig(base_length=length)
            for _ in range(3):
                target = random_unitary(2, rng)
                got = basic_approx(target, cfg).achieved_distance
                want = brute_force_best_distance(target, cfg.basis, length)
                brute_ok &= abs(got - want) < 1e-9

        growth = measure_sk_growth(
            [0.3, 0.9, 1.7, 2.5], SkConfig(base_length=10, eps_target=1e-3),
            max_depth=2,
        )
        elapsed = time.perf_counter() - start
        _verdict(
            "solovay-kitaev",
            monotone and final_ok and brute_ok and growth.finite and elapsed < 300,
            f"Rz(pi/8) distances {[round(d, 4) for d in dists]} non-increasing "
            f"and final <= 0.15; brute-force match {brute_ok}; exponent "
            f"c = {growth.exponent:.2f} finite; {elapsed:.0f}s < 300s",
        )

    def test_determinism(self, tmp_path):
        spec = RandomCircuitSpec(num_qubits=2, depth=3, seed=5)
        for name in ("a", "b"):
            build_dataset(10, spec, EAGLE, IONQ, 256, tmp_path / f"{name}.jsonl")
        gen_ok = (tmp_path / "a.jsonl").read_bytes() == (
            tmp_path / "b.jsonl"
        ).read_bytes()

        pairs = prepare_pairs(load_pairs(tmp_path / "a.jsonl"), VOCAB)
        blobs = []
        for run in range(2):
            model = build_model(toy_preset(VOCAB.size), seed=4)
            train(
                pairs, model, VOCAB, LossConfig(),
                TrainConfig(steps=5, batch_size=4, seed=4),
                out_dir=tmp_path / f"run{run}",
            )
            blobs.append(
                (tmp_path / f"run{run}" / "ckpt-final" / "weights.bin").read_bytes()
            )
        train_ok = blobs[0] == blobs[1]

        bench = [
            scaling_rows_csv(
                measure_tokens("depth", 2, [1, 2, 3], EAGLE, VOCAB, 10, seed=6)
            )
            for _ in range(2)
        ]
        bench_ok = bench[0] == bench[1]
        _verdict(
            "determinism",
            gen_ok and train_ok and bench_ok,
            f"gen-data byte-identical {gen_ok}, train checkpoints "
            f"byte-identical {train_ok}, bench byte-identical {bench_ok}",
        )
