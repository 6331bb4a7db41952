"""Small shared helpers: counter-based RNG streams and JSONL io."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np


def philox(key: int, *counter: int) -> np.random.Generator:
    """Counter-based generator: same (key, counter) always yields the same stream.

    Used everywhere determinism must survive reordering: per-tick env rolls,
    per-(actor, hero) action sampling, per-component parameter init.
    """
    ctr = [0, 0, 0, 0]
    for i, c in enumerate(counter[:4]):
        ctr[3 - i] = int(c) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(key=int(key) & (2**64 - 1), counter=ctr))


def write_jsonl(path: str | Path, rows: Iterable[dict], append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode) as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")


def append_jsonl(path: str | Path, row: dict) -> None:
    with open(path, "a") as f:
        f.write(json.dumps(row, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                yield json.loads(line)
