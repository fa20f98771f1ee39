"""Command-line entry point.

Subcommands: gen-data, tokenize, transpile, sk, train, eval, bench,
inspect.  Options may come from a TOML config file (--config); explicit
flags override file values.  Commands that write a run directory echo
the effective configuration (seed included) to ``effective-config.json``
there.  Exit codes: 0 success, 1 validation failure, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from . import __version__

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int = EXIT_VALIDATION) -> "CliError":
    return CliError(message, code)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise _fail(f"config file not found: {p}", EXIT_IO)
    try:
        with open(p, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise _fail(f"invalid TOML in {p}: {exc}")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise _fail(f"unsupported schema_version {version}")
    return data


def _merged(section: dict, args: argparse.Namespace, keys: dict) -> dict:
    """File values overridden by explicitly-passed flags (flag wins when
    its parsed value is not None)."""
    out = dict(section)
    for config_key, attr in keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[config_key] = value
    return out


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise _fail(f"file not found: {p}", EXIT_IO)
    return p.read_text()


def _echo_config(out_dir: Path, effective: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "effective-config.json").write_text(
        json.dumps(effective, indent=2, sort_keys=True) + "\n"
    )


def _parse_circuit(text: str):
    from .qasm import QasmParseError, parse

    try:
        return parse(text)
    except QasmParseError as exc:
        raise _fail(f"QASM parse error: {exc}")


# ---------------------------------------------------------------- commands


def cmd_gen_data(args) -> int:
    from .dataset import build_dataset
    from .gatesets import GATE_SETS
    from .randgen import RandomCircuitSpec

    cfg = _load_config(args.config).get("dataset", {})
    eff = _merged(cfg, args, {
        "pairs": "pairs", "qubits": "qubits", "depth": "depth",
        "source": "source", "target": "target", "seed": "seed",
        "context_window": "context_window",
        "include_measure": "include_measure",
    })
    eff.setdefault("pairs", 1000)
    eff.setdefault("qubits", 1)
    eff.setdefault("depth", 4)
    eff.setdefault("seed", 0)
    eff.setdefault("context_window", 256)
    eff.setdefault("include_measure", False)
    for key in ("source", "target"):
        if key not in eff:
            raise _fail(f"missing required option: {key}")
        if eff[key] not in GATE_SETS:
            raise _fail(f"unknown gate set {eff[key]!r}")
    out_path = Path(args.out)
    spec = RandomCircuitSpec(
        num_qubits=eff["qubits"], depth=eff["depth"],
        include_measure=eff["include_measure"], seed=eff["seed"],
    )
    stats = build_dataset(
        eff["pairs"], spec, GATE_SETS[eff["source"]], GATE_SETS[eff["target"]],
        eff["context_window"], out_path,
    )
    _echo_config(out_path.parent, {"command": "gen-data", "dataset": eff})
    print(json.dumps({
        "written": stats.written, "dropped": stats.dropped,
        "mean_token_len_src": stats.mean_token_len_src,
        "mean_token_len_tgt": stats.mean_token_len_tgt,
        "path": str(out_path),
    }, indent=2))
    return EXIT_OK


def cmd_tokenize(args) -> int:
    from .tokenizer import build_vocabulary, encode

    circuit = _parse_circuit(_read_text(args.file))
    vocab = build_vocabulary()
    seq = encode(circuit, vocab)
    for token_id in seq.ids:
        print(f"{token_id}\t{vocab.token(token_id)}")
    return EXIT_OK


def cmd_transpile(args) -> int:
    from .gatesets import GATE_SETS, TranspileError, transpile_rules
    from .qasm import emit
    from .sim import circuit_fidelity

    circuit = _parse_circuit(_read_text(args.file))
    if args.checkpoint is not None:
        return _transpile_with_model(args, circuit)
    for name, value in (("--from", args.source), ("--to", args.target)):
        if value is None:
            raise _fail(f"{name} is required with --oracle")
        if value not in GATE_SETS:
            raise _fail(f"unknown gate set {value!r}")
    try:
        result = transpile_rules(circuit, GATE_SETS[args.target])
    except TranspileError as exc:
        raise _fail(f"transpile failed: {exc}")
    print(emit(result), end="")
    report = {"fidelity": circuit_fidelity(circuit, result)}
    print(json.dumps(report), file=sys.stderr)
    return EXIT_OK


def _transpile_with_model(args, circuit) -> int:
    import torch

    from .checkpoint import load_checkpoint
    from .decoding import DecodeConfig, decode_sequence
    from .qasm import emit
    from .sim import DimensionError, circuit_fidelity
    from .tokenizer import (
        DecodeError, TokenSequence, build_vocabulary, decode, encode,
    )

    model, manifest = load_checkpoint(Path(args.checkpoint))
    vocab = build_vocabulary()
    if manifest["vocab_hash"] != vocab.content_hash():
        raise _fail("checkpoint vocabulary hash does not match")
    src = encode(circuit, vocab).ids
    out_ids = decode_sequence(
        model, src,
        DecodeConfig(max_len=model.cfg.context_window),
        vocab.bos_id, vocab.eos_id,
    )
    try:
        result = decode(TokenSequence(tuple(out_ids)), vocab)
    except DecodeError as exc:
        print(json.dumps({"grammar_valid": False, "error": exc.reason}),
              file=sys.stderr)
        return EXIT_VALIDATION
    print(emit(result), end="")
    try:
        fidelity = circuit_fidelity(circuit, result)
    except DimensionError:
        fidelity = 0.0
    print(json.dumps({"grammar_valid": True, "fidelity": fidelity}),
          file=sys.stderr)
    return EXIT_OK


def cmd_sk(args) -> int:
    from .qasm import emit
    from .sim import circuit_fidelity
    from .sk import SkConfig, SkError, sk_circuit

    cfg_file = _load_config(args.config).get("sk", {})
    eff = _merged(cfg_file, args, {
        "basis": "basis", "base_length": "base_length",
        "recursion_depth": "recursion_depth", "eps_target": "eps_target",
        "cache_dir": "cache_dir",
    })
    eff.setdefault("basis", ["h", "t", "tdg"])
    eff.setdefault("base_length", 12)
    eff.setdefault("recursion_depth", 2)
    eff.setdefault("eps_target", 0.01)
    circuit = _parse_circuit(_read_text(args.file))
    try:
        cfg = SkConfig(
            basis=tuple(eff["basis"]), base_length=eff["base_length"],
            recursion_depth=eff["recursion_depth"],
            eps_target=eff["eps_target"], cache_dir=eff.get("cache_dir"),
        )
        result = sk_circuit(circuit, cfg)
    except SkError as exc:
        raise _fail(f"decomposition failed: {exc}")
    print(emit(result), end="")
    print(json.dumps({"fidelity": circuit_fidelity(circuit, result),
                      "gates": len(result.ops)}), file=sys.stderr)
    return EXIT_OK


def _loss_config(section: dict):
    from .losses import LossConfig

    kwargs = {}
    if "eps_smooth" in section:
        kwargs["eps_smooth"] = section["eps_smooth"]
    if "schedule" in section:
        kwargs["schedule"] = tuple(tuple(p) for p in section["schedule"])
    elif "alpha" in section or "beta" in section:
        kwargs["schedule"] = (
            (0, section.get("alpha", 0.0), section.get("beta", 1.0)),
        )
    return LossConfig(**kwargs)


def _model_config(section: dict, vocab_size: int):
    from .model import ModelConfig, reference_preset, toy_preset

    preset = section.get("preset", "toy")
    if preset == "toy":
        base = toy_preset(vocab_size)
    elif preset == "reference":
        base = reference_preset(section.get("vocab_size", 3))
    else:
        raise _fail(f"unknown model preset {preset!r}")
    overrides = {
        k: v for k, v in section.items()
        if k in base.to_dict() and k != "vocab_size"
    }
    if overrides:
        base = ModelConfig(**{**base.to_dict(), **overrides})
    return base


def cmd_train(args) -> int:
    from .dataset import load_pairs
    from .losses import LossConfigError
    from .model import ModelConfigError, build_model
    from .tokenizer import build_vocabulary
    from .train import DivergenceError, TrainConfig, prepare_pairs, train

    data_path = Path(args.data)
    if not data_path.exists():
        raise _fail(f"dataset not found: {data_path}", EXIT_IO)
    config = _load_config(args.config)
    train_section = _merged(config.get("train", {}), args, {
        "steps": "steps", "batch_size": "batch_size", "seed": "seed",
        "eval_every": "eval_every", "checkpoint_every": "checkpoint_every",
    })
    vocab = build_vocabulary()
    try:
        lc = _loss_config(config.get("loss", {}))
        model_cfg = _model_config(config.get("model", {}), vocab.size)
        tc = TrainConfig(**{
            k: train_section[k] for k in (
                "steps", "batch_size", "lr_base", "warmup_steps", "seed",
                "holdout_frac", "eval_every", "checkpoint_every", "grad_clip",
            ) if k in train_section
        })
    except (LossConfigError, ModelConfigError, TypeError, ValueError) as exc:
        raise _fail(f"invalid configuration: {exc}")
    out_dir = Path(args.out)
    _echo_config(out_dir, {
        "command": "train",
        "data": str(data_path),
        "loss": config.get("loss", {}),
        "model": model_cfg.to_dict(),
        "train": {
            "steps": tc.steps, "batch_size": tc.batch_size,
            "lr_base": tc.lr_base, "warmup_steps": tc.warmup_steps,
            "seed": tc.seed, "holdout_frac": tc.holdout_frac,
            "eval_every": tc.eval_every,
            "checkpoint_every": tc.checkpoint_every,
            "grad_clip": tc.grad_clip,
        },
    })
    pairs = prepare_pairs(load_pairs(data_path), vocab)
    model = build_model(model_cfg, pad_id=vocab.pad_id, seed=tc.seed)
    try:
        result = train(pairs, model, vocab, lc, tc, out_dir=out_dir)
    except DivergenceError as exc:
        raise _fail(str(exc))
    print(result.final_eval.to_json())
    return EXIT_OK


def cmd_eval(args) -> int:
    from .checkpoint import CheckpointError, load_checkpoint
    from .dataset import load_pairs
    from .evaluate import evaluate
    from .losses import LossConfig
    from .tokenizer import build_vocabulary
    from .train import prepare_pairs

    data_path = Path(args.data)
    if not data_path.exists():
        raise _fail(f"dataset not found: {data_path}", EXIT_IO)
    try:
        model, manifest = load_checkpoint(Path(args.checkpoint))
    except (CheckpointError, FileNotFoundError) as exc:
        raise _fail(f"cannot load checkpoint: {exc}", EXIT_IO)
    vocab = build_vocabulary()
    if manifest["vocab_hash"] != vocab.content_hash():
        raise _fail("checkpoint vocabulary hash does not match")
    pairs = prepare_pairs(load_pairs(data_path), vocab)
    report = evaluate(model, pairs, vocab, LossConfig())
    print(report.to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    from .gatesets import GATE_SETS
    from .scaling import measure_tokens, scaling_rows_csv
    from .tokenizer import build_vocabulary

    if args.gate_set not in GATE_SETS:
        raise _fail(f"unknown gate set {args.gate_set!r}")
    sweep = list(range(args.sweep_min, args.sweep_max + 1))
    if not sweep:
        raise _fail("empty sweep range")
    rows = measure_tokens(
        args.axis, args.fixed, sweep, GATE_SETS[args.gate_set],
        build_vocabulary(), samples=args.samples, seed=args.seed or 0,
    )
    csv_text = scaling_rows_csv(rows)
    print(csv_text, end="")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "scaling.csv").write_text(csv_text)
        _echo_config(out_dir, {
            "command": "bench", "axis": args.axis, "fixed": args.fixed,
            "sweep": [args.sweep_min, args.sweep_max],
            "samples": args.samples, "gate_set": args.gate_set,
            "seed": args.seed or 0,
        })
    return EXIT_OK


def cmd_inspect(args) -> int:
    from .tokenizer import build_vocabulary

    target = Path(args.target)
    if target.is_dir() and (target / "manifest.json").exists():
        manifest = json.loads((target / "manifest.json").read_text())
        summary = {
            "kind": "checkpoint",
            "step": manifest.get("step"),
            "vocab_hash": manifest.get("vocab_hash"),
            "config": manifest.get("config"),
            "n_arrays": len(manifest.get("arrays", [])),
            "n_params": sum(a["numel"] for a in manifest.get("arrays", [])),
        }
    elif target.suffix == ".jsonl" and target.exists():
        sidecar = target.with_name(target.name + ".manifest.json")
        summary = {"kind": "dataset", "path": str(target)}
        if sidecar.exists():
            summary["manifest"] = json.loads(sidecar.read_text())
    elif args.target == "vocab":
        vocab = build_vocabulary()
        summary = {
            "kind": "vocabulary", "size": vocab.size,
            "hash": vocab.content_hash(), "qmax": vocab.qmax,
            "lam": vocab.lam,
        }
    else:
        raise _fail(f"nothing to inspect at {target}", EXIT_IO)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transqasm",
        description="Quantum circuit transpilation workbench",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a transpilation pair dataset")
    p.add_argument("--config")
    p.add_argument("--pairs", type=int)
    p.add_argument("--qubits", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--seed", type=int)
    p.add_argument("--context-window", dest="context_window", type=int)
    p.add_argument("--include-measure", dest="include_measure",
                   action="store_const", const=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("tokenize", help="print the token listing of a QASM file")
    p.add_argument("file")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("transpile", help="translate a QASM file")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true",
                   help="use the rule-based oracle")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="target")
    p.add_argument("--checkpoint", help="use a trained model instead")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("sk", help="decompose single-qubit gates into a discrete basis")
    p.add_argument("file")
    p.add_argument("--config")
    p.add_argument("--basis", nargs="+")
    p.add_argument("--base-length", dest="base_length", type=int)
    p.add_argument("--recursion-depth", dest="recursion_depth", type=int)
    p.add_argument("--eps-target", dest="eps_target", type=float)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.set_defaults(func=cmd_sk)

    p = sub.add_parser("train", help="train a model on a dataset")
    p.add_argument("--config")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--eval-every", dest="eval_every", type=int)
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="token-count scaling benchmark")
    p.add_argument("--axis", choices=["depth", "qubits"], required=True)
    p.add_argument("--fixed", type=int, required=True)
    p.add_argument("--sweep-min", dest="sweep_min", type=int, default=1)
    p.add_argument("--sweep-max", dest="sweep_max", type=int, required=True)
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--gate-set", dest="gate_set", default="eagle")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect", help="describe a checkpoint, dataset, or 'vocab'")
    p.add_argument("target")
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
