"""Fixed-length unroll records and their wire representation.

A Trajectory is one hero's 16-step slice: observations, sampled actions with
their legality masks and head-relevance flags, behavior log-probs and value
predictions from the policy version that acted, rewards, and the bootstrap
value for the following state. Serialization is a JSON header plus raw
little-endian array payload, guarded by a CRC32 so transport bugs surface as
checksum failures instead of silent corruption.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, fields

import numpy as np

_DTYPES = {
    "scalar": "<f4", "units": "<f4", "spatial": "<f4", "hidden": "<f4",
    "h0": "<f4", "c0": "<f4",
    "what": "<i2", "who": "<i2", "how_x": "<i2", "how_y": "<i2",
    "mask_what": "|b1", "mask_who": "|b1",
    "rel_who": "|b1", "rel_how": "|b1",
    "behavior_logp": "<f8", "values": "<f4", "rewards": "<f8",
    "done": "|b1", "bootstrap": "<f4",
}


@dataclass
class Trajectory:
    scalar: np.ndarray          # [T, S]
    units: np.ndarray           # [T, K, F]
    spatial: np.ndarray         # [T, C, H, W]
    hidden: np.ndarray          # [T, Dh]
    h0: np.ndarray              # [w] LSTM state entering the unroll
    c0: np.ndarray              # [w]
    what: np.ndarray            # [T]
    who: np.ndarray             # [T]
    how_x: np.ndarray           # [T]
    how_y: np.ndarray           # [T]
    mask_what: np.ndarray       # [T, n_what]
    mask_who: np.ndarray        # [T, K]
    rel_who: np.ndarray         # [T] who head relevant to the chosen what
    rel_how: np.ndarray         # [T] how heads relevant
    behavior_logp: np.ndarray   # [T] joint logp of relevant heads at act time
    values: np.ndarray          # [T, 5] behavior value predictions
    rewards: np.ndarray         # [T, 5]
    done: np.ndarray            # [T]
    bootstrap: np.ndarray       # [5] value of the state after the unroll
    policy_version: int = 0

    @property
    def T(self) -> int:
        return int(self.scalar.shape[0])

    def to_bytes(self) -> bytes:
        names = [f.name for f in fields(self) if f.name != "policy_version"]
        payload = b""
        meta = []
        for name in names:
            arr = np.ascontiguousarray(getattr(self, name), dtype=_DTYPES[name])
            payload += arr.tobytes()
            meta.append({"name": name, "shape": list(arr.shape)})
        header = json.dumps({"meta": meta, "version": int(self.policy_version)},
                            sort_keys=True).encode()
        crc = zlib.crc32(payload) & 0xFFFFFFFF
        return struct.pack("<II", len(header), crc) + header + payload

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Trajectory":
        hlen, crc = struct.unpack_from("<II", raw, 0)
        header = json.loads(raw[8:8 + hlen].decode())
        payload = raw[8 + hlen:]
        if (zlib.crc32(payload) & 0xFFFFFFFF) != crc:
            raise ValueError("trajectory payload failed CRC32 check")
        off = 0
        kw = {}
        for entry in header["meta"]:
            name = entry["name"]
            shape = tuple(entry["shape"])
            dt = np.dtype(_DTYPES[name])
            count = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(payload, dtype=dt, count=count, offset=off)
            kw[name] = arr.reshape(shape).copy()
            off += count * dt.itemsize
        if off != len(payload):
            raise ValueError("trajectory payload has trailing bytes")
        return cls(policy_version=int(header["version"]), **kw)


class TrajectoryBatch:
    """Column-stacks trajectories into [T, B, ...] arrays for the learner."""

    SEQ = ("scalar", "units", "spatial", "hidden", "what", "who", "how_x",
           "how_y", "mask_what", "mask_who", "rel_who", "rel_how",
           "behavior_logp", "values", "rewards", "done")

    def __init__(self, trajs: list[Trajectory]):
        if not trajs:
            raise ValueError("empty trajectory batch")
        T = trajs[0].T
        if any(t.T != T for t in trajs):
            raise ValueError("mixed unroll lengths in one batch")
        self.trajs = trajs
        self.arrays: dict[str, np.ndarray] = {}
        for name in self.SEQ:
            self.arrays[name] = np.stack([getattr(t, name) for t in trajs], axis=1)
        self.h0 = np.stack([t.h0 for t in trajs], axis=0)
        self.c0 = np.stack([t.c0 for t in trajs], axis=0)
        self.bootstrap = np.stack([t.bootstrap for t in trajs], axis=0)
        self.versions = np.asarray([t.policy_version for t in trajs], dtype=np.int64)

    @property
    def T(self) -> int:
        return int(self.arrays["scalar"].shape[0])

    @property
    def B(self) -> int:
        return int(self.arrays["scalar"].shape[1])

    def seq_inputs(self) -> dict:
        return {k: self.arrays[k] for k in ("scalar", "units", "spatial", "hidden")}
