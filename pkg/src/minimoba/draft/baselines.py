"""Reference drafting strategies: uniform random, greedy by solo win rate,
and exhaustive minimax over the full pick tree (small pools only).

All strategies share one protocol: f(state, rng) -> hero_id, with the
candidate pool bound at construction time.
"""

from __future__ import annotations

from functools import lru_cache

from .state import DraftState, legal_picks


def make_random_strategy(pool_ids):
    pool_ids = tuple(sorted(int(i) for i in pool_ids))

    def strategy(state: DraftState, rng) -> int:
        picks = legal_picks(state, pool_ids)
        return int(picks[rng.integers(len(picks))])

    return strategy


def make_hwr_strategy(pool_ids, hero_winrates):
    """Greedy: always take the available hero with the highest marginal win
    rate. Ties break to the lowest id (ascending scan, strict improvement)."""
    pool_ids = tuple(sorted(int(i) for i in pool_ids))
    wr = {int(h): float(w) for h, w in hero_winrates.items()}

    def strategy(state: DraftState, rng) -> int:
        best_id, best_wr = -1, -1.0
        for hid in legal_picks(state, pool_ids):
            w = wr[hid]
            if w > best_wr:
                best_id, best_wr = hid, w
        return best_id

    return strategy


MINIMAX_MAX_POOL = 8


def minimax_value(state: DraftState, pool_ids, predictor) -> float:
    """Exact game value (team A's win probability under optimal play) of a
    draft position. Positions are memoized on (picks_a, picks_b) as sets:
    pick order within a team does not change the completed lineup."""
    pool_ids = tuple(sorted(int(i) for i in pool_ids))
    if len(pool_ids) > MINIMAX_MAX_POOL:
        raise ValueError(
            f"minimax over {len(pool_ids)} heroes is intractable; "
            f"max supported pool is {MINIMAX_MAX_POOL}")
    order = state.pick_order

    @lru_cache(maxsize=None)
    def solve(picks_a: frozenset, picks_b: frozenset) -> float:
        done = len(picks_a) + len(picks_b)
        if done == len(order):
            return predictor.predict(sorted(picks_a), sorted(picks_b))
        team = order[done]
        taken = picks_a | picks_b
        vals = []
        for hid in pool_ids:
            if hid in taken:
                continue
            if team == 0:
                vals.append(solve(picks_a | {hid}, picks_b))
            else:
                vals.append(solve(picks_a, picks_b | {hid}))
        return max(vals) if team == 0 else min(vals)

    return solve(frozenset(state.picks_a), frozenset(state.picks_b))


def make_minimax_strategy(pool_ids, predictor):
    """Plays the exact best response at every turn. Ties break to the lowest
    hero id. Exponential in pool size; guarded by MINIMAX_MAX_POOL."""
    pool_ids = tuple(sorted(int(i) for i in pool_ids))
    if len(pool_ids) > MINIMAX_MAX_POOL:
        raise ValueError(
            f"minimax over {len(pool_ids)} heroes is intractable; "
            f"max supported pool is {MINIMAX_MAX_POOL}")

    def strategy(state: DraftState, rng) -> int:
        team = state.team_to_pick
        best_id, best_v = -1, None
        for hid in legal_picks(state, pool_ids):
            v = minimax_value(state.pick(hid), pool_ids, predictor)
            better = best_v is None or (v > best_v if team == 0 else v < best_v)
            if better:
                best_id, best_v = hid, v
        return best_id

    return strategy
