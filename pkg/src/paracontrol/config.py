"""Run configuration: nested JSON with dotted-key overrides."""
from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path
from typing import Any

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "output_dir": "runs/default",
    "corpus": {"path": None, "synth_pairs": 2000, "ratios": [0.8, 0.1, 0.1]},
    "attrs": {"bins": 20},
    "vocab": {"min_count": 1},
    "generator": {"d": 64, "heads": 4, "encoder_layers": 2, "decoder_layers": 2, "max_len": 64,
                  "epochs": 3, "batch_size": 40, "lr": 1e-3},
    "predictor": {"d": 64, "heads": 4, "layers": 2, "max_len": 64, "epochs": 8, "batch_size": 40,
                  "lr": 1e-3},
    "semantic": {"d": 64, "heads": 4, "layers": 2, "max_len": 64, "temperature": 0.1, "epochs": 4,
                 "batch_size": 40, "lr": 1e-3},
    "qc": {"eta0": 1e-3, "gamma": 2.25, "tau": 0.95, "patience": 4, "max_iters": 100},
    "eval": {"penalty": 10.0, "average": "macro", "scorer": "semantic", "limit": None},
}


class ConfigError(ValueError):
    pass


def merge(base: dict, extra: dict, path: str = "") -> dict:
    """Recursive merge; keys absent from ``base`` are rejected to catch typos."""
    out = copy.deepcopy(base)
    for key, value in extra.items():
        where = f"{path}{key}"
        if key not in out:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(out[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where} must be an object")
            out[key] = merge(out[key], value, where + ".")
        else:
            out[key] = value
    return out


def parse_value(text: str) -> Any:
    """JSON literal if it parses, otherwise the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_dotted(cfg: dict, dotted: str, value: Any) -> None:
    *parents, leaf = dotted.split(".")
    node = cfg
    for i, part in enumerate(parents):
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"unknown config key: {'.'.join(parents[: i + 1])}")
        node = node[part]
    if leaf not in node:
        raise ConfigError(f"unknown config key: {dotted}")
    if isinstance(node[leaf], dict):
        raise ConfigError(f"{dotted} is a section; set one of its keys")
    node[leaf] = value


def get_dotted(cfg: dict, dotted: str) -> Any:
    node = cfg
    for part in dotted.split("."):
        node = node[part]
    return node


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> dict:
    """Defaults, then the JSON file (if any), then dotted overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        cfg = merge(cfg, data)
    for key, value in (overrides or {}).items():
        set_dotted(cfg, key, value)
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
