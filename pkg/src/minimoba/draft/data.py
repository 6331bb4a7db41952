"""Self-play dataset generation for the drafting models.

Two datasets feed the draft pipeline. Match rows (lineup pair + binary
outcome) come from playing real games between disjoint random lineups with
a fixed shared policy on both sides; they train the win-rate predictor.
Draft rows come from MCTS-vs-MCTS simulated drafting scored by that
predictor; they train the value net that replaces rollouts at play time.
"""

from __future__ import annotations

import numpy as np

from ..arena.bots import ScriptedBot
from ..arena.series import play_match
from ..config import EnvConfig, desk_config
from ..heroes import HeroSpec
from ..util import philox
from .mcts import mcts_pick, rollout_evaluator
from .models import encode_draft
from .state import DraftState, fresh_draft, legal_picks


def random_disjoint_lineups(pool_size: int, team_size: int, rng):
    """Sample 2*team_size distinct heroes and split them across the teams."""
    ids = rng.permutation(pool_size)[: 2 * team_size]
    return sorted(int(i) for i in ids[:team_size]), \
        sorted(int(i) for i in ids[team_size:])


def gen_match_dataset(pool: list[HeroSpec], team_size: int, n_matches: int,
                      cfg: EnvConfig | None = None, seed: int = 0,
                      max_ticks: int | None = None) -> list[dict]:
    """Play n_matches scripted-vs-scripted games between random disjoint
    lineups. Returns rows {"a": ids, "b": ids, "winner": 0|1}; draws are
    dropped (the predictor trains on binary outcomes only)."""
    if 2 * team_size > len(pool):
        raise ValueError("pool too small for two disjoint lineups")
    cfg = cfg if cfg is not None else desk_config()
    bot_a, bot_b = ScriptedBot(), ScriptedBot()
    rows = []
    for m in range(n_matches):
        rng = philox(seed, 0xD47A, m)
        a_ids, b_ids = random_disjoint_lineups(len(pool), team_size, rng)
        res = play_match(cfg, [pool[i] for i in a_ids], [pool[i] for i in b_ids],
                         bot_a, bot_b, seed=seed * 1_000_003 + m,
                         max_ticks=max_ticks)
        if res["winner"] in (0, 1):
            rows.append({"a": a_ids, "b": b_ids, "winner": int(res["winner"])})
    return rows


def hero_winrates(rows: list[dict], pool_size: int) -> dict[int, float]:
    """Per-hero frequency win rate: games won with the hero on the winning
    side over games played. Heroes never seen get 0.5."""
    games = np.zeros(pool_size, dtype=np.int64)
    wins = np.zeros(pool_size, dtype=np.int64)
    for r in rows:
        for h in r["a"]:
            games[h] += 1
            wins[h] += 1 - r["winner"]
        for h in r["b"]:
            games[h] += 1
            wins[h] += r["winner"]
    return {h: (wins[h] / games[h] if games[h] else 0.5)
            for h in range(pool_size)}


def run_draft(state: DraftState, pool_ids, strategy_a, strategy_b,
              seed: int = 0) -> DraftState:
    """Drive a draft to completion, calling each team's strategy in turn."""
    pool_ids = tuple(sorted(int(i) for i in pool_ids))
    t = 0
    while not state.terminal:
        strat = strategy_a if state.team_to_pick == 0 else strategy_b
        hid = int(strat(state, philox(seed, 0xD12F7, t)))
        state = state.pick(hid)
        t += 1
    return state


def gen_draft_dataset(predictor, team_size: int, n_drafts: int,
                      iterations: int = 200, seed: int = 0,
                      order: str = "alternating"):
    """Simulate n_drafts MCTS-vs-MCTS drafts and emit one row per pending
    pick: the 2*team_size states a value net is queried at during search.
    Every row of a draft carries that draft's terminal predictor value, so
    the empty-draft rows average to the mean terminal label by construction.

    Returns (X, y) with X[i] the draft-state encoding and y[i] the label.
    """
    pool_ids = tuple(range(predictor.pool_size))
    evaluate = rollout_evaluator(predictor)
    xs, ys = [], []
    for d in range(n_drafts):
        state = fresh_draft(team_size, order)
        states = []
        t = 0
        while not state.terminal:
            states.append(state)
            hid = mcts_pick(state, pool_ids, evaluate, iterations,
                            seed=seed * 69069 + d * 64 + t)
            state = state.pick(hid)
            t += 1
        label = predictor.predict(state.picks_a, state.picks_b)
        for s in states:
            xs.append(encode_draft(predictor.pool_size, s))
            ys.append(label)
    return np.stack(xs), np.asarray(ys, dtype=np.float64)


def duel(strategy_a, strategy_b, pool: list[HeroSpec], team_size: int,
         n_drafts: int, cfg: EnvConfig | None = None, seed: int = 0,
         order: str = "alternating", max_ticks: int | None = None) -> dict:
    """Pit two drafting strategies over n_drafts real games with a fixed
    shared policy (scripted bots on both sides). Sides swap every draft so
    neither strategy always drafts first."""
    cfg = cfg if cfg is not None else desk_config()
    pool_ids = tuple(range(len(pool)))
    bot = ScriptedBot()
    wins_a = wins_b = draws = 0
    for d in range(n_drafts):
        flipped = d % 2 == 1
        s_first, s_second = (strategy_b, strategy_a) if flipped else \
            (strategy_a, strategy_b)
        final = run_draft(fresh_draft(team_size, order), pool_ids,
                          s_first, s_second, seed=seed + 7919 * d)
        lineup_a = [pool[i] for i in final.picks_a]
        lineup_b = [pool[i] for i in final.picks_b]
        res = play_match(cfg, lineup_a, lineup_b, bot, bot,
                         seed=seed + 7919 * d + 1, max_ticks=max_ticks)
        w = res["winner"]
        if w == 2:
            draws += 1
        elif (w == 0) != flipped:
            wins_a += 1
        else:
            wins_b += 1
    return {"wins_a": wins_a, "wins_b": wins_b, "draws": draws, "n": n_drafts}
