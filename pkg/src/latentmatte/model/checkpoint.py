"""Checkpoint directories: a manifest naming one .vt file per weight.

Layout:
    manifest.txt   lines "name<TAB>weights/name.vt"
    config.txt     [model] architecture keys, [meta] training provenance
    weights/*.vt
"""

import configparser
from pathlib import Path

import numpy as np

from ..errors import NoCheckpoint
from ..numerics import load_tensor, save_tensor
from .config import ModelConfig


def save_checkpoint(directory: str | Path, weights: dict, config: ModelConfig, meta: dict | None = None) -> None:
    directory = Path(directory)
    (directory / "weights").mkdir(parents=True, exist_ok=True)
    lines = []
    for name in sorted(weights):
        rel = f"weights/{name}.vt"
        save_tensor(directory / rel, np.asarray(weights[name], dtype=np.float32))
        lines.append(f"{name}\t{rel}")
    (directory / "manifest.txt").write_text("\n".join(lines) + "\n")
    cp = configparser.ConfigParser()
    cp["model"] = {k: str(v) for k, v in config.to_dict().items()}
    cp["meta"] = {k: str(v) for k, v in (meta or {}).items()}
    with open(directory / "config.txt", "w") as fh:
        cp.write(fh)


def load_checkpoint(directory: str | Path) -> tuple[dict, ModelConfig, dict]:
    directory = Path(directory)
    manifest = directory / "manifest.txt"
    if not manifest.exists():
        raise NoCheckpoint(f"no manifest.txt under {directory}")
    weights = {}
    for line in manifest.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        name, _, rel = line.partition("\t")
        path = directory / rel
        if not path.exists():
            raise NoCheckpoint(f"missing weight file {path}")
        weights[name] = load_tensor(path)
    cp = configparser.ConfigParser()
    cp.read(directory / "config.txt")
    config = ModelConfig.from_dict(dict(cp["model"])) if cp.has_section("model") else ModelConfig()
    meta = dict(cp["meta"]) if cp.has_section("meta") else {}
    return weights, config, meta
