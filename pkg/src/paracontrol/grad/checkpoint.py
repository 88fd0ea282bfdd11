"""Flat JSON checkpoints: parameter name -> shape + row-major values."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT = "paracontrol-checkpoint"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, params: dict[str, np.ndarray], meta: dict | None = None) -> None:
    payload = {
        "format": FORMAT,
        "version": VERSION,
        "meta": meta or {},
        "params": {
            name: {"shape": list(arr.shape), "values": np.asarray(arr, dtype=np.float64).reshape(-1).tolist()}
            for name, arr in params.items()
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CheckpointError(f"checkpoint not found: {path}") from None
    if payload.get("format") != FORMAT:
        raise CheckpointError(f"{path}: not a {FORMAT} file")
    if payload.get("version") != VERSION:
        raise CheckpointError(f"{path}: checkpoint version {payload.get('version')} != supported {VERSION}")
    params = {}
    for name, entry in payload["params"].items():
        arr = np.asarray(entry["values"], dtype=np.float64)
        shape = tuple(entry["shape"])
        if arr.size != int(np.prod(shape, dtype=np.int64)):
            raise CheckpointError(f"{path}: {name} has {arr.size} values for shape {shape}")
        params[name] = arr.reshape(shape)
    return params, payload.get("meta", {})
