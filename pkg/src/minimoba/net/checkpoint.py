"""Binary checkpoints: length-prefixed JSON descriptor + raw little-endian
float32 parameter payload in sorted name order. Round-trips bit-exactly."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import ModelConfig, PolicyValueNet

MAGIC = b"MNC1"
VERSION = 1


def save_checkpoint(path: str | Path, net: PolicyValueNet, meta: dict | None = None) -> None:
    names = sorted(net.params)
    desc = {
        "arch": net.descriptor(),
        "params": [{"name": n, "shape": list(net.params[n].shape)} for n in names],
        "meta": meta or {},
    }
    blob = json.dumps(desc, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<HI", VERSION, len(blob)))
        f.write(blob)
        for n in names:
            arr = np.ascontiguousarray(net.params[n], dtype="<f4")
            f.write(arr.tobytes())


def load_checkpoint(path: str | Path) -> tuple[PolicyValueNet, dict]:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ValueError(f"{path}: bad checkpoint magic {raw[:4]!r}")
    version, blen = struct.unpack_from("<HI", raw, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    off = 10
    desc = json.loads(raw[off:off + blen].decode())
    off += blen
    arch = dict(desc["arch"])
    arch["spatial_shape"] = tuple(arch["spatial_shape"])
    arch["conv_ch"] = tuple(arch["conv_ch"])
    cfg = ModelConfig(**arch)
    params = {}
    for entry in desc["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f4", count=count, offset=off).reshape(shape)
        params[entry["name"]] = arr.copy()
        off += 4 * count
    if off != len(raw):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    return PolicyValueNet(cfg, params), desc.get("meta", {})
