import json
from importlib import resources
from pathlib import Path

import pytest

from transqasm.cli import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main

RZ_EXAMPLE = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[1];
rz(3.19) q[0];
"""

CX_EXAMPLE = """OPENQASM 2.0;
include "qelib1.inc";
qreg q[2];
cx q[0],q[1];
"""


@pytest.fixture
def qasm_file(tmp_path):
    path = tmp_path / "in.qasm"
    path.write_text(RZ_EXAMPLE)
    return path


class TestTokenize:
    def test_param_64_listed(self, qasm_file, capsys):
        assert main(["tokenize", str(qasm_file)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PARAM_64" in out
        assert "rz" in out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["tokenize", str(tmp_path / "nope.qasm")]) == EXIT_IO
        assert "error" in capsys.readouterr().err

    def test_bad_qasm(self, tmp_path, capsys):
        bad = tmp_path / "bad.qasm"
        bad.write_text("OPENQASM 2.0;\nqreg q[1];\nfrobnicate q[0];\n")
        assert main(["tokenize", str(bad)]) == EXIT_VALIDATION


class TestTranspile:
    def test_oracle_to_ionq(self, qasm_file, capsys):
        code = main([
            "transpile", "--oracle", "--from", "eagle", "--to", "ionq",
            str(qasm_file),
        ])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert "OPENQASM 2.0;" in captured.out
        report = json.loads(captured.err.strip().splitlines()[-1])
        assert report["fidelity"] >= 1 - 1e-9

    def test_unknown_gate_set(self, qasm_file, capsys):
        code = main([
            "transpile", "--oracle", "--from", "eagle", "--to", "rigetti",
            str(qasm_file),
        ])
        assert code == EXIT_VALIDATION

    def test_missing_rule_fails_cleanly(self, tmp_path, capsys):
        path = tmp_path / "c.qasm"
        path.write_text(RZ_EXAMPLE)
        code = main([
            "transpile", "--oracle", "--from", "eagle", "--to", "clifford_t",
            str(path),
        ])
        assert code == EXIT_VALIDATION


class TestSk:
    def test_decomposes_rz(self, qasm_file, capsys):
        code = main(["sk", "--eps-target", "0.2", str(qasm_file)])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        report = json.loads(captured.err.strip().splitlines()[-1])
        assert report["gates"] >= 1
        assert 0 <= report["fidelity"] <= 1

    def test_cx_passthrough(self, tmp_path, capsys):
        path = tmp_path / "c.qasm"
        path.write_text(CX_EXAMPLE)
        assert main(["sk", str(path)]) == EXIT_OK
        assert "cx q[0],q[1];" in capsys.readouterr().out


class TestGenData:
    def test_writes_dataset_and_config_echo(self, tmp_path, capsys):
        out = tmp_path / "runs" / "pairs.jsonl"
        code = main([
            "gen-data", "--pairs", "5", "--qubits", "1", "--depth", "2",
            "--source", "eagle", "--target", "ionq", "--seed", "3",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        stats = json.loads(capsys.readouterr().out)
        assert stats["written"] == 5
        assert out.exists()
        echoed = json.loads((out.parent / "effective-config.json").read_text())
        assert echoed["dataset"]["seed"] == 3

    def test_requires_gate_sets(self, tmp_path):
        assert main([
            "gen-data", "--pairs", "2", "--out", str(tmp_path / "x.jsonl"),
        ]) == EXIT_VALIDATION

    def test_preset_config(self, tmp_path, capsys):
        preset = resources.files("transqasm") / "presets" / "eagle-to-ionq.toml"
        code = main([
            "gen-data", "--config", str(preset), "--pairs", "4",
            "--out", str(tmp_path / "p.jsonl"),
        ])
        assert code == EXIT_OK
        stats = json.loads(capsys.readouterr().out)
        assert stats["written"] == 4  # flag overrides the preset's 1000


class TestTrainEvalInspect:
    def test_end_to_end_small(self, tmp_path, capsys):
        data = tmp_path / "pairs.jsonl"
        assert main([
            "gen-data", "--pairs", "8", "--qubits", "1", "--depth", "2",
            "--source", "eagle", "--target", "ionq", "--seed", "1",
            "--out", str(data),
        ]) == EXIT_OK
        capsys.readouterr()
        run_dir = tmp_path / "run"
        code = main([
            "train", "--data", str(data), "--out", str(run_dir),
            "--steps", "3", "--batch-size", "4", "--seed", "0",
        ])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        report = json.loads(captured.out)
        assert 0 <= report["grammar_accuracy"] <= 1
        assert (run_dir / "trace.csv").exists()
        assert (run_dir / "effective-config.json").exists()
        assert (run_dir / "ckpt-final" / "manifest.json").exists()

        code = main([
            "eval", "--checkpoint", str(run_dir / "ckpt-final"),
            "--data", str(data),
        ])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert "perplexity" in json.loads(captured.out)

        code = main(["inspect", str(run_dir / "ckpt-final")])
        summary = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert summary["kind"] == "checkpoint"
        assert summary["n_params"] > 0

    def test_eval_missing_checkpoint(self, tmp_path, capsys):
        data = tmp_path / "pairs.jsonl"
        main([
            "gen-data", "--pairs", "2", "--qubits", "1", "--depth", "1",
            "--source", "eagle", "--target", "ionq", "--out", str(data),
        ])
        capsys.readouterr()
        assert main([
            "eval", "--checkpoint", str(tmp_path / "nope"), "--data", str(data),
        ]) == EXIT_IO


class TestBench:
    def test_csv_output(self, tmp_path, capsys):
        code = main([
            "bench", "--axis", "depth", "--fixed", "2", "--sweep-max", "4",
            "--samples", "5", "--out", str(tmp_path / "bench"),
        ])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert captured.out.startswith("axis,n_qubits,depth")
        assert (tmp_path / "bench" / "scaling.csv").exists()

    def test_bad_axis_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["bench", "--axis", "width", "--fixed", "1", "--sweep-max", "2"])


class TestInspectVocab:
    def test_vocab_summary(self, capsys):
        assert main(["inspect", "vocab"]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["kind"] == "vocabulary"
        assert summary["lam"] == 128

    def test_nothing_found(self, tmp_path, capsys):
        assert main(["inspect", str(tmp_path / "ghost")]) == EXIT_IO


class TestDeterminism:
    def test_gen_data_byte_identical(self, tmp_path, capsys):
        for name in ("a", "b"):
            main([
                "gen-data", "--pairs", "6", "--qubits", "2", "--depth", "3",
                "--source", "eagle", "--target", "heron", "--seed", "9",
                "--out", str(tmp_path / f"{name}.jsonl"),
            ])
        capsys.readouterr()
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_bench_byte_identical(self, tmp_path, capsys):
        outputs = []
        for _ in range(2):
            main([
                "bench", "--axis", "qubits", "--fixed", "3", "--sweep-max", "3",
                "--samples", "5", "--seed", "2",
            ])
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
