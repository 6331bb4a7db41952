"""Hero grouping for curriculum self-play.

Partitions the pool into fixed-size groups and splits each group into two
teams whose head-to-head win rate sits close to a coin flip. Balanced
fixed-lineup environments are what make Phase-1 teachers learnable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..util import philox


@dataclass(frozen=True)
class LineupGroup:
    team_a: tuple
    team_b: tuple
    winrate: float        # observed p(team_a wins) from the table

    def hero_ids(self) -> tuple:
        return tuple(self.team_a) + tuple(self.team_b)


def _lookup(table, team_a, team_b) -> float | None:
    """table: dict keyed by (sorted tuple, sorted tuple) or a callable.
    Missing dict entries return None; that split just can't be validated."""
    a, b = tuple(sorted(team_a)), tuple(sorted(team_b))
    if callable(table):
        return float(table(a, b))
    if (a, b) in table:
        return float(table[(a, b)])
    if (b, a) in table:
        return 1.0 - float(table[(b, a)])
    return None


def _splits(group: tuple):
    """All 2-team splits of a group, anchored so the smallest hero sits in
    team A (each unordered split enumerated once, in a deterministic order)."""
    group = tuple(sorted(group))
    rest = group[1:]
    half = len(group) // 2
    for others in combinations(rest, half - 1):
        team_a = (group[0],) + others
        team_b = tuple(h for h in group if h not in team_a)
        yield team_a, team_b


def _partitions(pool: tuple, group_size: int):
    """All unordered partitions of pool into groups of group_size, generated
    deterministically (always extending from the smallest unassigned hero)."""
    if not pool:
        yield ()
        return
    first = pool[0]
    rest = pool[1:]
    for others in combinations(rest, group_size - 1):
        group = (first,) + others
        remaining = tuple(h for h in rest if h not in others)
        for tail in _partitions(remaining, group_size):
            yield (group,) + tail


def group_heroes(pool_ids, table, group_size: int, tau: float = 0.05,
                 seed: int = 0) -> list[LineupGroup]:
    """Partition pool_ids into groups of `group_size` heroes, each split into
    two teams with |win-rate - 0.5| <= tau.

    Deterministic given the table and seed: candidate partitions are
    enumerated in canonical order, rotated by the seed, and the first
    partition whose every group admits a balanced split wins. Within a
    group the split closest to 0.5 is chosen.
    """
    pool = tuple(sorted(int(i) for i in pool_ids))
    if len(pool) == 0 or len(pool) % group_size != 0:
        raise ValueError(f"pool of {len(pool)} not divisible into groups of {group_size}")
    if group_size % 2 != 0:
        raise ValueError("group_size must be even (two equal teams per group)")
    if len(pool) > 12:
        raise ValueError("exhaustive grouping supports pools up to 12 heroes")

    parts = list(_partitions(pool, group_size))
    if seed:
        off = int(philox(seed, 0x6709).integers(len(parts)))
        parts = parts[off:] + parts[:off]

    for part in parts:
        groups = []
        for g in part:
            best = None
            for team_a, team_b in _splits(g):
                wr = _lookup(table, team_a, team_b)
                if wr is None:
                    continue
                if abs(wr - 0.5) <= tau and (best is None or
                                             abs(wr - 0.5) < abs(best.winrate - 0.5)):
                    best = LineupGroup(team_a, team_b, wr)
            if best is None:
                break
            groups.append(best)
        else:
            return groups
    raise ValueError(
        f"no grouping of {len(pool)} heroes has balanced splits within "
        f"tau={tau}; try a larger tau")


def elo_converged(history, window: int = 20, delta: float = 30.0) -> bool:
    """True iff the last `window` Elo points span at most `delta`. Short
    histories are simply not converged yet, never an error."""
    h = list(history)
    if len(h) < window:
        return False
    tail = h[-window:]
    return (max(tail) - min(tail)) <= delta
