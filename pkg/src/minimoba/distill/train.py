"""Multi-teacher distillation driver.

One persistent rollout worker per teacher environment; a strict round-robin
over workers decides which teacher supplies each training batch, so after U
updates every teacher has contributed either ceil(U/K) or floor(U/K) batches
(equal counts up to one batch). The student both explores and learns; no
environment reward ever reaches the loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import EnvConfig
from ..heroes import HeroSpec
from ..net.model import PolicyValueNet
from ..rl.adam import Adam
from ..sim.engine import MobaEnv
from .loss import distill_loss
from .rollout import DistillUnroll, TeacherSpec, distill_rollout


@dataclass
class DistillConfig:
    lr: float = 1e-4
    max_grad_norm: float = 10.0
    unroll_len: int = 16
    unrolls_per_batch: int = 4       # batch = this many unrolls from ONE teacher
    updates: int = 200
    seed: int = 0


class _Worker:
    """Owns one teacher's environment and the student's recurrent state in
    it, handing out unrolls on demand."""

    def __init__(self, student, teacher: TeacherSpec, cfg: EnvConfig,
                 pool: list[HeroSpec], seed: int):
        by_id = {h.hero_id: h for h in pool}
        self.env = MobaEnv(cfg, [by_id[i] for i in teacher.lineup_a],
                           [by_id[i] for i in teacher.lineup_b], seed=seed)
        self.student = student
        self.teacher = teacher
        self.seed = seed
        self.chunk = 0
        self.episode = 0

    def collect(self, n_unrolls: int, unroll_len: int) -> list[DistillUnroll]:
        outs = []
        while len(outs) < n_unrolls:
            got = distill_rollout(self.student, self.teacher, self.env,
                                  steps=unroll_len, seed=self.seed ^ (0x9E37 + self.chunk),
                                  unroll_len=unroll_len, start_episode=self.episode)
            self.chunk += 1
            outs.extend(got)
        return outs[:n_unrolls]


def _stack_unrolls(unrolls: list[DistillUnroll]):
    """Concatenate the hero axis of same-length unrolls into one batch."""
    seq = {k: np.concatenate([getattr(u, k) for u in unrolls], axis=1)
           for k in ("scalar", "units", "spatial", "hidden")}
    tg = {}
    for k in ("p_what", "p_who", "p_how_x", "p_how_y", "t_values",
              "mask_what", "mask_who"):
        tg[k] = np.concatenate([getattr(u, k) for u in unrolls], axis=1)
    h0 = np.concatenate([u.h0 for u in unrolls], axis=0)
    c0 = np.concatenate([u.c0 for u in unrolls], axis=0)
    return seq, tg, h0, c0


def distill_train(student: PolicyValueNet, teachers: list[TeacherSpec],
                  cfg: EnvConfig, pool: list[HeroSpec],
                  dcfg: DistillConfig | None = None,
                  on_update=None) -> dict:
    """Distill `teachers` into `student` (updated in place).

    Returns history plus per-teacher batch counts. Teacher lineups must be
    pairwise disjoint: each teacher owns its fixed-lineup environment.
    `on_update(row)` runs after every step; returning True stops early.
    """
    dcfg = dcfg or DistillConfig()
    if not teachers:
        raise ValueError("need at least one teacher")
    seen: set = set()
    for t in teachers:
        ids = set(t.hero_ids())
        if ids & seen:
            raise ValueError(f"teacher lineups overlap on heroes {sorted(ids & seen)}")
        seen |= ids

    workers = [_Worker(student, t, cfg, pool, seed=dcfg.seed * 7919 + 31 * k)
               for k, t in enumerate(teachers)]
    opt = Adam(student.params, lr=dcfg.lr, max_grad_norm=dcfg.max_grad_norm)
    history = []
    batch_counts = [0] * len(teachers)

    for u in range(dcfg.updates):
        k = u % len(teachers)             # strict round-robin
        w = workers[k]
        unrolls = w.collect(dcfg.unrolls_per_batch, dcfg.unroll_len)
        batch_counts[k] += 1
        seq, tg, h0, c0 = _stack_unrolls(unrolls)
        outs, cache = student.forward_seq(seq, h0, c0)
        loss, parts, douts = distill_loss(outs, tg)
        n = seq["scalar"].shape[0] * seq["scalar"].shape[1]
        douts = {key: v / n for key, v in douts.items()}
        grads = student.backward_seq(cache, douts)
        stats = opt.step(student.params, grads)
        row = {"update": u, "teacher": teachers[k].name or str(k),
               "loss": loss / n, "policy": parts["policy"] / n,
               "value": parts["value"] / n, "grad_norm": stats["grad_norm"]}
        history.append(row)
        if on_update is not None and on_update(row):
            break                     # caller signalled early stop

    env_ticks = sum(w.chunk * dcfg.unroll_len for w in workers)
    return {"history": history, "batch_counts": batch_counts,
            "env_ticks": env_ticks}
