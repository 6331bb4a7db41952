"""Student-driven rollout collection for policy distillation.

The student explores: its sampled actions drive the environment. The teacher
rides along, running its own forward pass (with its own recurrent state) on
the very same frames, and its per-head distributions and value predictions
are recorded as supervision. Environment rewards are never recorded; the
supervision signal is teacher outputs only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..net.layers import masked_softmax
from ..net.model import PolicyValueNet
from ..sim.actions import Action, head_relevance
from ..sim.engine import MobaEnv
from ..util import philox


@dataclass(frozen=True)
class TeacherSpec:
    """A converged fixed-lineup model plus the lineup it was trained on."""
    net: PolicyValueNet
    lineup_a: tuple
    lineup_b: tuple
    name: str = ""

    def hero_ids(self) -> tuple:
        return tuple(self.lineup_a) + tuple(self.lineup_b)


@dataclass
class DistillUnroll:
    """Fixed-length slice of a student rollout with teacher supervision.

    Array layout matches the RL trajectory batch: time-major [T, B, ...]
    where B is the hero count of the teacher's environment. h0/c0 are the
    student's recurrent state at the start of the slice, so a training
    forward over the slice reproduces the rollout activations exactly.
    """
    scalar: np.ndarray
    units: np.ndarray
    spatial: np.ndarray
    hidden: np.ndarray
    mask_what: np.ndarray
    mask_who: np.ndarray
    h0: np.ndarray
    c0: np.ndarray
    # teacher supervision
    p_what: np.ndarray
    p_who: np.ndarray
    p_how_x: np.ndarray
    p_how_y: np.ndarray
    t_values: np.ndarray
    # what the student actually did (bookkeeping, not a training target)
    what: np.ndarray
    who: np.ndarray
    how_x: np.ndarray
    how_y: np.ndarray
    teacher: str = ""

    @property
    def n_samples(self) -> int:
        return int(self.scalar.shape[0] * self.scalar.shape[1])

    def seq_inputs(self) -> dict:
        return {"scalar": self.scalar, "units": self.units,
                "spatial": self.spatial, "hidden": self.hidden}

    def targets(self) -> dict:
        return {"p_what": self.p_what, "p_who": self.p_who,
                "p_how_x": self.p_how_x, "p_how_y": self.p_how_y,
                "t_values": self.t_values,
                "mask_what": self.mask_what, "mask_who": self.mask_who}


def _sample_masked_u(logits, mask, u: float) -> int:
    p = masked_softmax(logits, mask)
    cdf = np.cumsum(p)
    idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    idx = min(idx, len(p) - 1)
    if not mask[idx]:
        legal = np.flatnonzero(mask)
        if legal.size == 0:
            return 0
        idx = int(legal[np.argmax(p[legal])])
    return idx


def distill_rollout(student: PolicyValueNet, teacher: TeacherSpec,
                    env: MobaEnv, steps: int, seed: int = 0,
                    unroll_len: int = 16, start_episode: int = 0) -> list:
    """Run `steps` env ticks with the student acting and the teacher
    observing; returns the completed DistillUnrolls (steps // unroll_len).

    The env must be built on the teacher's fixed lineup; anything else is
    rejected. Finished episodes reseed and reset in place; both recurrent
    states carry across the boundary, mirroring the actor loop.
    """
    got = tuple(h.hero_id for h in env.heroes)
    if got != teacher.hero_ids():
        raise ValueError(
            f"lineup mismatch: env has {got}, teacher fixed on {teacher.hero_ids()}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if steps == 0:
        return []

    n = env.lay.n_heroes
    nb = env.cfg.n_move_bins
    hs, cs = student.zero_state(n)
    ht, ct = teacher.net.zero_state(n)
    episode = start_episode
    obs = env.reset(seed=philox(seed, 0xE9, episode).integers(1 << 31))

    out: list[DistillUnroll] = []
    buf: list[dict] = []
    h0, c0 = hs.copy(), cs.copy()

    for tick in range(steps):
        batch = {
            "scalar": np.stack([obs[i].scalar for i in range(n)]),
            "units": np.stack([obs[i].units for i in range(n)]),
            "spatial": np.stack([obs[i].spatial for i in range(n)]),
            "hidden": np.stack([obs[i].hidden for i in range(n)]),
        }
        mask_what = np.stack([obs[i].mask_what for i in range(n)])
        mask_who = np.stack([obs[i].mask_who for i in range(n)])

        s_out = student.step(batch, hs, cs)
        t_out = teacher.net.step(batch, ht, ct)
        hs, cs = s_out["h"], s_out["c"]
        ht, ct = t_out["h"], t_out["c"]

        bins_mask = np.ones(nb, dtype=bool)
        acts = []
        for i in range(n):
            rng = philox(seed, 0xD15, episode, tick, i)
            u = rng.random(4)
            what = _sample_masked_u(s_out["what"][i], mask_what[i], u[0])
            needs_who, _ = head_relevance(what, env.heroes[i])
            who = _sample_masked_u(s_out["who"][i], mask_who[i], u[1]) \
                if needs_who else 0
            hx = _sample_masked_u(s_out["how_x"][i], bins_mask, u[2])
            hy = _sample_masked_u(s_out["how_y"][i], bins_mask, u[3])
            acts.append(Action(what, who, hx, hy))

        buf.append({
            **batch, "mask_what": mask_what, "mask_who": mask_who,
            "p_what": masked_softmax(t_out["what"], mask_what),
            "p_who": masked_softmax(t_out["who"], mask_who),
            "p_how_x": masked_softmax(t_out["how_x"], np.ones_like(t_out["how_x"], dtype=bool)),
            "p_how_y": masked_softmax(t_out["how_y"], np.ones_like(t_out["how_y"], dtype=bool)),
            "t_values": np.asarray(t_out["values"], dtype=np.float64),
            "what": np.asarray([a.what for a in acts], dtype=np.int16),
            "who": np.asarray([a.who for a in acts], dtype=np.int16),
            "how_x": np.asarray([a.how_x for a in acts], dtype=np.int16),
            "how_y": np.asarray([a.how_y for a in acts], dtype=np.int16),
        })

        obs, _, done, _ = env.step(acts)
        if done:
            episode += 1
            obs = env.reset(seed=philox(seed, 0xE9, episode).integers(1 << 31))

        if len(buf) == unroll_len:
            out.append(_pack(buf, h0, c0, teacher.name))
            buf = []
            h0, c0 = hs.copy(), cs.copy()

    return out


def _pack(buf: list, h0, c0, name: str) -> DistillUnroll:
    def st(key):
        return np.stack([r[key] for r in buf])
    return DistillUnroll(
        scalar=st("scalar"), units=st("units"), spatial=st("spatial"),
        hidden=st("hidden"), mask_what=st("mask_what"), mask_who=st("mask_who"),
        h0=h0, c0=c0,
        p_what=st("p_what"), p_who=st("p_who"),
        p_how_x=st("p_how_x"), p_how_y=st("p_how_y"), t_values=st("t_values"),
        what=st("what"), who=st("who"), how_x=st("how_x"), how_y=st("how_y"),
        teacher=name,
    )
