"""Head-to-head match series with side swapping and outcome logging."""

from __future__ import annotations

from pathlib import Path

from ..config import EnvConfig
from ..heroes import HeroSpec
from ..sim.engine import MobaEnv
from ..util import append_jsonl
from .bots import Player


def play_match(cfg: EnvConfig, lineup_a: list[HeroSpec], lineup_b: list[HeroSpec],
               player_a: Player, player_b: Player, seed: int,
               max_ticks: int | None = None) -> dict:
    """One match: player_a drives team 0, player_b team 1. Returns winner
    (0/1/2-draw) plus per-team score stats."""
    env = MobaEnv(cfg, lineup_a, lineup_b, seed=seed)
    need_obs = player_a.wants_obs or player_b.wants_obs
    obs = env.reset(build_obs=need_obs)
    player_a.begin_episode(env, 0)
    player_b.begin_episode(env, 1)
    limit = max_ticks if max_ticks is not None else cfg.horizon
    ticks = 0
    while not env.done and ticks < limit:
        acts = player_a.act(env, obs, 0) + player_b.act(env, obs, 1)
        obs, _, done, info = env.step(acts, build_obs=need_obs)
        ticks += 1
    winner = env.winner if env.done else 2
    s = env.s
    return {
        "winner": int(winner),
        "ticks": ticks,
        "kills": [int(s.team_kills[0]), int(s.team_kills[1])],
        "base_hp": [float(s.hp[env.lay.base_of(0)]), float(s.hp[env.lay.base_of(1)])],
    }


def play_series(cfg: EnvConfig, lineup_a: list[HeroSpec], lineup_b: list[HeroSpec],
                player_a: Player, player_b: Player, n_matches: int, seed: int,
                swap_sides: bool = True, max_ticks: int | None = None,
                log_path: str | Path | None = None) -> dict:
    """n_matches between two players. With swap_sides, odd matches flip which
    team each player (and its lineup) controls, cancelling any side bias.
    Returns win counts from player_a's perspective."""
    wins_a = wins_b = draws = 0
    rows = []
    for m in range(n_matches):
        flipped = swap_sides and (m % 2 == 1)
        if flipped:
            res = play_match(cfg, lineup_b, lineup_a, player_b, player_a,
                             seed=seed + m, max_ticks=max_ticks)
            w = res["winner"]
            outcome = "draw" if w == 2 else ("a" if w == 1 else "b")
        else:
            res = play_match(cfg, lineup_a, lineup_b, player_a, player_b,
                             seed=seed + m, max_ticks=max_ticks)
            w = res["winner"]
            outcome = "draw" if w == 2 else ("a" if w == 0 else "b")
        if outcome == "a":
            wins_a += 1
        elif outcome == "b":
            wins_b += 1
        else:
            draws += 1
        row = {"match": m, "flipped": flipped, "outcome": outcome, **res,
               "player_a": player_a.name, "player_b": player_b.name,
               "seed": seed + m}
        rows.append(row)
        if log_path is not None:
            append_jsonl(log_path, row)
    return {"wins_a": wins_a, "wins_b": wins_b, "draws": draws,
            "n": n_matches, "matches": rows}
