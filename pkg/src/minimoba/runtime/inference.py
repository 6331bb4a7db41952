"""Centralized policy inference with deterministic per-stream sampling.

The server owns a private copy of the policy parameters and serves batched
forward passes. Action sampling is keyed by (actor, hero) with a per-pair
request counter driving a counter-based RNG, and every request consumes a
fixed number of uniform draws, so the sampled actions do not depend on how
requests happen to be batched together or interleaved across actors. Combined
with batch-invariant forward math this makes in-process and socket transports
produce bit-identical rollouts under lockstep scheduling.
"""

from __future__ import annotations

import socket
import threading
from dataclasses import dataclass

import numpy as np

from ..heroes import HeroSpec
from ..net.model import PolicyValueNet
from ..rl.losses import masked_log_softmax
from ..sim.actions import head_relevance
from ..util import philox
from .frames import FrameType, pack_payload, read_frame, unpack_payload, write_frame
from .pool import MemoryPool


@dataclass
class InferRequest:
    actor_id: int
    hero: int                  # hero slot in its env
    hero_id: int               # pool id, for head-relevance rules
    scalar: np.ndarray
    units: np.ndarray
    spatial: np.ndarray
    hidden: np.ndarray
    mask_what: np.ndarray
    mask_who: np.ndarray
    h: np.ndarray
    c: np.ndarray


@dataclass
class InferReply:
    what: int
    who: int
    how_x: int
    how_y: int
    rel_who: bool
    rel_how: bool
    logp: float
    values: np.ndarray         # [5] f32
    h: np.ndarray
    c: np.ndarray
    version: int


def _sample_u(logits: np.ndarray, mask: np.ndarray, u: float) -> tuple[int, float]:
    """Inverse-CDF draw from the masked softmax using uniform u. Returns
    (index, logp). Illegal entries have probability exactly zero."""
    logp, p = masked_log_softmax(logits, mask)
    cdf = np.cumsum(p)
    total = cdf[-1]
    if total <= 0.0:
        return 0, 0.0
    idx = int(np.searchsorted(cdf, u * total, side="right"))
    idx = min(idx, len(p) - 1)
    if not mask[idx]:
        legal = np.flatnonzero(mask)
        idx = int(legal[np.argmax(p[legal])])
    return idx, float(logp[idx])


class InferenceServer:
    """Pure compute: no transport. Thread-safe."""

    DRAWS_PER_REQUEST = 4

    def __init__(self, net: PolicyValueNet, hero_pool: list[HeroSpec], seed: int = 0):
        self.net = PolicyValueNet(net.cfg, {k: v.copy() for k, v in net.params.items()})
        self.heroes = {h.hero_id: h for h in hero_pool}
        self.seed = int(seed)
        self.version = 0
        self._counters: dict[tuple[int, int], int] = {}
        self._lock = threading.Lock()

    def set_params(self, params: dict[str, np.ndarray], version: int) -> None:
        with self._lock:
            for k, v in params.items():
                self.net.params[k][...] = v
            self.version = int(version)

    def infer_batch(self, requests: list[InferRequest]) -> list[InferReply]:
        if not requests:
            return []
        with self._lock:
            obs = {
                "scalar": np.stack([r.scalar for r in requests]),
                "units": np.stack([r.units for r in requests]),
                "spatial": np.stack([r.spatial for r in requests]),
                "hidden": np.stack([r.hidden for r in requests]),
            }
            h = np.stack([r.h for r in requests])
            c = np.stack([r.c for r in requests])
            outs = self.net.step(obs, h, c)
            version = self.version
            replies = []
            for i, req in enumerate(requests):
                key = (int(req.actor_id), int(req.hero))
                count = self._counters.get(key, 0)
                self._counters[key] = count + 1
                rng = philox(self.seed, count, key[1], key[0])
                u = rng.random(self.DRAWS_PER_REQUEST)

                what, lp_what = _sample_u(outs["what"][i], req.mask_what, u[0])
                rel_who, rel_how = head_relevance(what, self.heroes[int(req.hero_id)])
                logp = lp_what
                who = 0
                hx, lp_hx = _sample_u(outs["how_x"][i],
                                      np.ones_like(outs["how_x"][i], dtype=bool), u[2])
                hy, lp_hy = _sample_u(outs["how_y"][i],
                                      np.ones_like(outs["how_y"][i], dtype=bool), u[3])
                if rel_who:
                    who, lp_who = _sample_u(outs["who"][i], req.mask_who, u[1])
                    logp += lp_who
                if rel_how:
                    logp += lp_hx + lp_hy
                replies.append(InferReply(
                    what=what, who=who, how_x=hx, how_y=hy,
                    rel_who=bool(rel_who), rel_how=bool(rel_how),
                    logp=float(logp),
                    values=outs["values"][i].astype(np.float32),
                    h=outs["h"][i].copy(), c=outs["c"][i].copy(),
                    version=version,
                ))
            return replies


class DirectClient:
    """In-process transport: calls the server object directly."""

    def __init__(self, server: InferenceServer, pool: MemoryPool | None = None):
        self.server = server
        self.pool = pool

    def infer(self, req: InferRequest) -> InferReply:
        return self.server.infer_batch([req])[0]

    def push_traj(self, blob: bytes) -> None:
        if self.pool is None:
            raise RuntimeError("no pool attached to this client")
        self.pool.push(blob)

    def close(self) -> None:
        pass


_REQ_ARRAYS = ("scalar", "units", "spatial", "hidden", "mask_what", "mask_who", "h", "c")


class SocketServer:
    """Serves frames over TCP: inference, trajectory ingestion, param pushes."""

    def __init__(self, server: InferenceServer, pool: MemoryPool,
                 host: str = "127.0.0.1", port: int = 0):
        self.server = server
        self.pool = pool
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(64)
        self.address = self._sock.getsockname()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return
            t = threading.Thread(target=self._serve, args=(conn,), daemon=True)
            t.start()
            self._threads.append(t)

    def _serve(self, conn: socket.socket):
        try:
            while True:
                ftype, payload = read_frame(conn)
                if ftype == FrameType.INFER_REQ:
                    meta, arrays = unpack_payload(payload)
                    req = InferRequest(actor_id=meta["actor_id"], hero=meta["hero"],
                                       hero_id=meta["hero_id"],
                                       **{k: arrays[k] for k in _REQ_ARRAYS})
                    rep = self.server.infer_batch([req])[0]
                    out = pack_payload(
                        {"what": rep.what, "who": rep.who, "how_x": rep.how_x,
                         "how_y": rep.how_y, "rel_who": rep.rel_who,
                         "rel_how": rep.rel_how, "logp": rep.logp,
                         "version": rep.version},
                        {"values": rep.values, "h": rep.h, "c": rep.c})
                    write_frame(conn, FrameType.INFER_REP, out)
                elif ftype == FrameType.TRAJ_PUSH:
                    self.pool.push(payload)
                    write_frame(conn, FrameType.CONTROL,
                                pack_payload({"ok": True, "pool": len(self.pool)}))
                elif ftype == FrameType.PARAM_SNAPSHOT:
                    meta, arrays = unpack_payload(payload)
                    self.server.set_params(arrays, meta["version"])
                    write_frame(conn, FrameType.CONTROL,
                                pack_payload({"ok": True, "version": meta["version"]}))
                elif ftype == FrameType.CONTROL:
                    meta, _ = unpack_payload(payload)
                    if meta.get("cmd") == "stop":
                        write_frame(conn, FrameType.CONTROL, pack_payload({"ok": True}))
                        return
                    write_frame(conn, FrameType.CONTROL,
                                pack_payload({"ok": True, "version": self.server.version,
                                              "pool": len(self.pool)}))
                else:
                    raise ValueError(f"unexpected frame type {ftype}")
        except (ConnectionError, OSError):
            return
        finally:
            conn.close()

    def close(self):
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass


class SocketClient:
    def __init__(self, host: str, port: int):
        self._sock = socket.create_connection((host, port))
        self._lock = threading.Lock()

    def infer(self, req: InferRequest) -> InferReply:
        payload = pack_payload(
            {"actor_id": int(req.actor_id), "hero": int(req.hero),
             "hero_id": int(req.hero_id)},
            {k: getattr(req, k) for k in _REQ_ARRAYS})
        with self._lock:
            write_frame(self._sock, FrameType.INFER_REQ, payload)
            ftype, raw = read_frame(self._sock)
        if ftype != FrameType.INFER_REP:
            raise ValueError(f"expected INFER_REP, got {ftype}")
        meta, arrays = unpack_payload(raw)
        return InferReply(what=meta["what"], who=meta["who"], how_x=meta["how_x"],
                          how_y=meta["how_y"], rel_who=meta["rel_who"],
                          rel_how=meta["rel_how"], logp=meta["logp"],
                          values=arrays["values"], h=arrays["h"], c=arrays["c"],
                          version=meta["version"])

    def push_traj(self, blob: bytes) -> None:
        with self._lock:
            write_frame(self._sock, FrameType.TRAJ_PUSH, blob)
            read_frame(self._sock)

    def send_params(self, params: dict, version: int) -> None:
        with self._lock:
            write_frame(self._sock, FrameType.PARAM_SNAPSHOT,
                        pack_payload({"version": int(version)}, params))
            read_frame(self._sock)

    def ping(self) -> dict:
        with self._lock:
            write_frame(self._sock, FrameType.CONTROL, pack_payload({"cmd": "ping"}))
            _, raw = read_frame(self._sock)
        meta, _ = unpack_payload(raw)
        return meta

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass
