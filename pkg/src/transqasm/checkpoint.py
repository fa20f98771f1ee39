"""Checkpoint directory format: ``manifest.json`` describing the config,
vocabulary hash, step, and a named-array index (name, shape, offset,
numel), next to ``weights.bin`` holding every array concatenated as
row-major little-endian 32-bit floats."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .model import ModelConfig, TranspilerModel

MANIFEST_NAME = "manifest.json"
WEIGHTS_NAME = "weights.bin"


class CheckpointError(Exception):
    pass


def save_checkpoint(
    model: TranspilerModel,
    path: str | Path,
    vocab_hash: str,
    step: int,
) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    arrays = []
    offset = 0
    chunks = []
    for name, param in model.state_dict().items():
        flat = param.detach().cpu().numpy().astype("<f4").ravel(order="C")
        arrays.append(
            {
                "name": name,
                "shape": list(param.shape),
                "offset": offset,
                "numel": int(flat.size),
            }
        )
        chunks.append(flat)
        offset += int(flat.size)
    (path / WEIGHTS_NAME).write_bytes(b"".join(c.tobytes() for c in chunks))
    manifest = {
        "config": model.cfg.to_dict(),
        "pad_id": model.pad_id,
        "vocab_hash": vocab_hash,
        "step": step,
        "arrays": arrays,
    }
    (path / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return path


def load_checkpoint(path: str | Path) -> tuple[TranspilerModel, dict]:
    """Returns the reconstructed model and the manifest dict."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.exists():
        raise CheckpointError(f"no {MANIFEST_NAME} in {path}")
    manifest = json.loads(manifest_path.read_text())
    cfg = ModelConfig.from_dict(manifest["config"])
    model = TranspilerModel(cfg, pad_id=manifest["pad_id"])
    blob = np.frombuffer((path / WEIGHTS_NAME).read_bytes(), dtype="<f4")
    state = {}
    for entry in manifest["arrays"]:
        chunk = blob[entry["offset"] : entry["offset"] + entry["numel"]]
        if chunk.size != entry["numel"]:
            raise CheckpointError(f"truncated blob at array {entry['name']!r}")
        state[entry["name"]] = torch.from_numpy(
            chunk.reshape(entry["shape"]).copy()
        )
    missing = set(model.state_dict()) - set(state)
    if missing:
        raise CheckpointError(f"missing arrays: {sorted(missing)}")
    model.load_state_dict(state)
    model.eval()
    return model, manifest
