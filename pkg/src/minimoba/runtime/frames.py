"""Length-prefixed binary frames for actor/learner/inference traffic.

Wire layout, all little-endian:

    magic   4 bytes  b"MBF1"
    version u16      protocol version (currently 1)
    type    u16      FrameType
    length  u32      payload byte count
    payload length bytes

Payloads that carry arrays use pack_payload: a u32-length JSON header (meta
dict plus array name/dtype/shape manifest) followed by the raw array bytes.
"""

from __future__ import annotations

import json
import socket
import struct
from enum import IntEnum

import numpy as np

MAGIC = b"MBF1"
PROTOCOL_VERSION = 1
_HDR = struct.Struct("<4sHHI")


class FrameType(IntEnum):
    INFER_REQ = 1
    INFER_REP = 2
    TRAJ_PUSH = 3
    PARAM_SNAPSHOT = 4
    CONTROL = 5


def encode_frame(ftype: int, payload: bytes) -> bytes:
    return _HDR.pack(MAGIC, PROTOCOL_VERSION, int(ftype), len(payload)) + payload


def decode_frame(buf: bytes) -> tuple[int, bytes, bytes]:
    """Parse one frame off the front of buf -> (type, payload, remainder)."""
    if len(buf) < _HDR.size:
        raise ValueError("short frame header")
    magic, version, ftype, length = _HDR.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError(f"bad frame magic {magic!r}")
    if version != PROTOCOL_VERSION:
        raise ValueError(f"unsupported frame protocol version {version}")
    end = _HDR.size + length
    if len(buf) < end:
        raise ValueError("truncated frame payload")
    return int(ftype), buf[_HDR.size:end], buf[end:]


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    chunks = []
    got = 0
    while got < n:
        chunk = sock.recv(n - got)
        if not chunk:
            raise ConnectionError("peer closed mid-frame")
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    head = _recv_exact(sock, _HDR.size)
    magic, version, ftype, length = _HDR.unpack(head)
    if magic != MAGIC:
        raise ValueError(f"bad frame magic {magic!r}")
    if version != PROTOCOL_VERSION:
        raise ValueError(f"unsupported frame protocol version {version}")
    payload = _recv_exact(sock, length) if length else b""
    return int(ftype), payload


def write_frame(sock: socket.socket, ftype: int, payload: bytes) -> None:
    sock.sendall(encode_frame(ftype, payload))


# ---------------------------------------------------------------- payloads

def pack_payload(meta: dict, arrays: dict[str, np.ndarray] | None = None) -> bytes:
    arrays = arrays or {}
    manifest = []
    blobs = []
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        manifest.append({"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)})
        blobs.append(arr.tobytes())
    header = json.dumps({"meta": meta, "arrays": manifest}, sort_keys=True).encode()
    return struct.pack("<I", len(header)) + header + b"".join(blobs)


def unpack_payload(raw: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    (hlen,) = struct.unpack_from("<I", raw, 0)
    header = json.loads(raw[4:4 + hlen].decode())
    off = 4 + hlen
    arrays = {}
    for entry in header["arrays"]:
        dt = np.dtype(entry["dtype"])
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype=dt, count=count, offset=off)
        arrays[entry["name"]] = arr.reshape(shape).copy()
        off += count * dt.itemsize
    if off != len(raw):
        raise ValueError("frame payload has trailing bytes")
    return header["meta"], arrays
