"""Versioned JSONL replay logs with bit-exact playback verification.

A replay stores the config, lineups (as default-pool hero ids), the match
seed, every tick's joint action, and the post-tick state digest. Because the
engine is deterministic given (state, actions, seed), replaying the actions
in a fresh process must reproduce every digest exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..config import EnvConfig
from ..heroes import default_hero_pool
from ..util import read_jsonl
from .actions import Action
from .engine import MobaEnv

REPLAY_MAGIC = "minimoba-replay"
REPLAY_VERSION = 1


class ReplayWriter:
    def __init__(self, path: str | Path, cfg: EnvConfig, lineup_a: list[int],
                 lineup_b: list[int], seed: int, pool_size: int = 8,
                 pool_jitter: int = 0):
        from ..config import to_dict
        self.path = Path(path)
        self._f = open(self.path, "w")
        header = {
            "magic": REPLAY_MAGIC,
            "version": REPLAY_VERSION,
            "config": to_dict(cfg),
            "config_hash": cfg.config_hash(),
            "lineup_a": list(map(int, lineup_a)),
            "lineup_b": list(map(int, lineup_b)),
            "seed": int(seed),
            "pool": {"size": int(pool_size), "jitter_seed": int(pool_jitter)},
        }
        self._f.write(json.dumps(header, sort_keys=True) + "\n")

    def record(self, tick: int, actions: list[Action], state_hash: str) -> None:
        row = {
            "t": int(tick),
            "actions": [[a.what, a.who, a.how_x, a.how_y] for a in actions],
            "hash": state_hash,
        }
        self._f.write(json.dumps(row, sort_keys=True) + "\n")

    def finish(self, winner: int, final_hash: str) -> None:
        self._f.write(json.dumps({"end": True, "winner": int(winner),
                                  "hash": final_hash}, sort_keys=True) + "\n")
        self._f.close()


class ReplayReader:
    def __init__(self, path: str | Path):
        rows = list(read_jsonl(path))
        if not rows:
            raise ValueError(f"{path}: empty replay")
        header = rows[0]
        if header.get("magic") != REPLAY_MAGIC:
            raise ValueError(f"{path}: not a replay file (bad magic)")
        if header.get("version") != REPLAY_VERSION:
            raise ValueError(f"{path}: unsupported replay version {header.get('version')}")
        self.header = header
        self.steps = [r for r in rows[1:] if "t" in r]
        tail = [r for r in rows[1:] if r.get("end")]
        self.end = tail[0] if tail else None

    def make_env(self) -> MobaEnv:
        h = self.header
        cfg_d = dict(h["config"])
        cfg = EnvConfig(**{k: (dict(v) if isinstance(v, dict) else v)
                           for k, v in cfg_d.items()})
        pool = default_hero_pool(h["pool"]["size"], h["pool"]["jitter_seed"])
        by_id = {p.hero_id: p for p in pool}
        lu_a = [by_id[i] for i in h["lineup_a"]]
        lu_b = [by_id[i] for i in h["lineup_b"]]
        return MobaEnv(cfg, lu_a, lu_b, seed=h["seed"])

    def actions_at(self, i: int) -> list[Action]:
        return [Action(*row) for row in self.steps[i]["actions"]]


def verify_replay(path: str | Path) -> tuple[bool, str]:
    """Re-run a replay from scratch and compare every recorded state digest."""
    reader = ReplayReader(path)
    env = reader.make_env()
    env.reset(build_obs=False)
    for i, step in enumerate(reader.steps):
        if env.done:
            return False, f"step {i}: replay continues past terminal state"
        env.step(reader.actions_at(i), build_obs=False)
        got = env.state_hash()
        if got != step["hash"]:
            return False, f"step {i} (tick {step['t']}): digest mismatch"
    if reader.end is not None:
        if env.winner != reader.end["winner"]:
            return False, f"final winner mismatch: {env.winner} != {reader.end['winner']}"
        if env.state_hash() != reader.end["hash"]:
            return False, "final digest mismatch"
    return True, f"ok: {len(reader.steps)} ticks verified"


def replay_file(path: str | Path, cfg: EnvConfig, lineup_a: list[int],
                lineup_b: list[int], seed: int, policy, max_ticks: int | None = None,
                pool_size: int = 8, pool_jitter: int = 0) -> dict:
    """Play a match with `policy(env, obs_list) -> list[Action]` and record it."""
    pool = default_hero_pool(pool_size, pool_jitter)
    by_id = {p.hero_id: p for p in pool}
    env = MobaEnv(cfg, [by_id[i] for i in lineup_a], [by_id[i] for i in lineup_b],
                  seed=seed)
    writer = ReplayWriter(path, cfg, lineup_a, lineup_b, seed,
                          pool_size=pool_size, pool_jitter=pool_jitter)
    obs = env.reset()
    ticks = 0
    limit = max_ticks if max_ticks is not None else cfg.horizon
    while not env.done and ticks < limit:
        actions = policy(env, obs)
        obs, _, done, info = env.step(actions)
        writer.record(info["tick"], actions, env.state_hash())
        ticks += 1
    writer.finish(env.winner, env.state_hash())
    return {"ticks": ticks, "winner": env.winner, "path": str(writer.path)}
