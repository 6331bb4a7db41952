"""Self-play actor: rolls its env with server-sampled actions and ships
fixed-length unrolls to the trajectory pool."""

from __future__ import annotations

import numpy as np

from ..rl.trajectory import Trajectory
from ..sim.actions import Action
from .inference import InferRequest


class ActorLoop:
    """Plays every hero in its env through the shared policy (frames are
    team-mirrored, so one policy drives both sides). LSTM state carries
    across episode resets; unrolls may span episode boundaries, with per-step
    done flags marking them for GAE."""

    def __init__(self, env_factory, client, actor_id: int, lstm_width: int,
                 unroll_len: int = 16):
        self.env_factory = env_factory
        self.client = client
        self.actor_id = int(actor_id)
        self.unroll_len = int(unroll_len)
        self.episode = 0
        self.env = env_factory(self.episode, self.actor_id)
        self.obs = self.env.reset()
        n = self.env.lay.n_heroes
        self.n_heroes = n
        self.h = np.zeros((n, lstm_width), dtype=np.float32)
        self.c = np.zeros((n, lstm_width), dtype=np.float32)
        self._buf: list[list[dict]] = [[] for _ in range(n)]
        self._h0 = [None] * n
        self._c0 = [None] * n
        self.stats = {"ticks": 0, "episodes": 0, "trajs": 0,
                      "wins_a": 0, "wins_b": 0, "draws": 0}

    def run_ticks(self, n_ticks: int) -> dict:
        for _ in range(n_ticks):
            self._tick()
        return dict(self.stats)

    # ------------------------------------------------------------------

    def _tick(self):
        env = self.env
        replies = []
        for i in range(self.n_heroes):
            ob = self.obs[i]
            req = InferRequest(
                actor_id=self.actor_id, hero=i,
                hero_id=env.heroes[i].hero_id,
                scalar=ob.scalar, units=ob.units, spatial=ob.spatial,
                hidden=ob.hidden, mask_what=ob.mask_what, mask_who=ob.mask_who,
                h=self.h[i], c=self.c[i])
            rep = self.client.infer(req)
            replies.append(rep)
            if len(self._buf[i]) == self.unroll_len:
                self._finalize(i, rep.values)
            if not self._buf[i]:
                self._h0[i] = self.h[i].copy()
                self._c0[i] = self.c[i].copy()

        actions = [Action(r.what, r.who, r.how_x, r.how_y) for r in replies]
        next_obs, rewards, done, info = env.step(actions)

        for i, rep in enumerate(replies):
            ob = self.obs[i]
            self._buf[i].append({
                "scalar": ob.scalar, "units": ob.units, "spatial": ob.spatial,
                "hidden": ob.hidden, "mask_what": ob.mask_what,
                "mask_who": ob.mask_who,
                "what": rep.what, "who": rep.who, "how_x": rep.how_x,
                "how_y": rep.how_y, "rel_who": rep.rel_who, "rel_how": rep.rel_how,
                "logp": rep.logp, "values": rep.values,
                "reward": rewards[i], "done": done, "version": rep.version,
            })
            self.h[i] = rep.h
            self.c[i] = rep.c
            if done and len(self._buf[i]) == self.unroll_len:
                self._finalize(i, np.zeros(5, dtype=np.float32))

        self.stats["ticks"] += 1
        if done:
            self.stats["episodes"] += 1
            w = env.winner
            key = {0: "wins_a", 1: "wins_b", 2: "draws"}[w]
            self.stats[key] += 1
            self.episode += 1
            self.env = self.env_factory(self.episode, self.actor_id)
            self.obs = self.env.reset()
        else:
            self.obs = next_obs

    def _finalize(self, i: int, bootstrap: np.ndarray):
        buf = self._buf[i]
        assert len(buf) == self.unroll_len
        traj = Trajectory(
            scalar=np.stack([r["scalar"] for r in buf]),
            units=np.stack([r["units"] for r in buf]),
            spatial=np.stack([r["spatial"] for r in buf]),
            hidden=np.stack([r["hidden"] for r in buf]),
            h0=self._h0[i], c0=self._c0[i],
            what=np.asarray([r["what"] for r in buf], dtype=np.int16),
            who=np.asarray([r["who"] for r in buf], dtype=np.int16),
            how_x=np.asarray([r["how_x"] for r in buf], dtype=np.int16),
            how_y=np.asarray([r["how_y"] for r in buf], dtype=np.int16),
            mask_what=np.stack([r["mask_what"] for r in buf]),
            mask_who=np.stack([r["mask_who"] for r in buf]),
            rel_who=np.asarray([r["rel_who"] for r in buf], dtype=bool),
            rel_how=np.asarray([r["rel_how"] for r in buf], dtype=bool),
            behavior_logp=np.asarray([r["logp"] for r in buf], dtype=np.float64),
            values=np.stack([r["values"] for r in buf]).astype(np.float32),
            rewards=np.stack([r["reward"] for r in buf]).astype(np.float64),
            done=np.asarray([r["done"] for r in buf], dtype=bool),
            bootstrap=np.asarray(bootstrap, dtype=np.float32),
            policy_version=int(min(r["version"] for r in buf)),
        )
        self.client.push_traj(traj.to_bytes())
        self.stats["trajs"] += 1
        self._buf[i] = []
