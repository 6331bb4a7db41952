"""Draft bookkeeping: who picked what, whose turn it is.

A draft is an ordered sequence of hero picks alternating between the two
teams. The pick order is explicit (a tuple of team tags) so alternating and
snake schemes share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def alternating_order(team_size: int) -> tuple[int, ...]:
    """A,B,A,B,... the minimal fair scheme."""
    return tuple(i % 2 for i in range(2 * team_size))


def snake_order(team_size: int) -> tuple[int, ...]:
    """A,B,B,A,A,...: after the opening pick teams take two in a row, with
    the final chunk truncated so both end at team_size picks."""
    out = [0]
    turn = 1
    while len(out) < 2 * team_size:
        take = min(2, 2 * team_size - len(out))
        out.extend([turn] * take)
        turn = 1 - turn
    return tuple(out)


@dataclass(frozen=True)
class DraftState:
    """Immutable draft position. picks_a/picks_b are in pick order."""

    pick_order: tuple[int, ...]
    picks_a: tuple[int, ...] = field(default=())
    picks_b: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if set(self.pick_order) - {0, 1}:
            raise ValueError("pick_order entries must be team tags 0/1")
        if self.pick_order.count(0) != self.pick_order.count(1):
            raise ValueError("pick_order must give both teams equal picks")
        taken = list(self.picks_a) + list(self.picks_b)
        if len(set(taken)) != len(taken):
            raise ValueError(f"hero picked twice: {sorted(taken)}")
        prefix = self.pick_order[:len(taken)]
        if (prefix.count(0), prefix.count(1)) != (len(self.picks_a), len(self.picks_b)):
            raise ValueError("picks inconsistent with pick_order prefix")

    @property
    def turn_index(self) -> int:
        return len(self.picks_a) + len(self.picks_b)

    @property
    def terminal(self) -> bool:
        return self.turn_index == len(self.pick_order)

    @property
    def team_to_pick(self) -> int:
        if self.terminal:
            raise ValueError("terminal draft has no team to pick")
        return self.pick_order[self.turn_index]

    def pick(self, hero_id: int) -> "DraftState":
        if self.terminal:
            raise ValueError("cannot pick in a terminal draft")
        if hero_id in self.picks_a or hero_id in self.picks_b:
            raise ValueError(f"hero {hero_id} already picked")
        if self.team_to_pick == 0:
            return DraftState(self.pick_order, self.picks_a + (hero_id,), self.picks_b)
        return DraftState(self.pick_order, self.picks_a, self.picks_b + (hero_id,))


def fresh_draft(team_size: int, order: str = "alternating") -> DraftState:
    if order == "alternating":
        return DraftState(alternating_order(team_size))
    if order == "snake":
        return DraftState(snake_order(team_size))
    raise ValueError(f"unknown pick order scheme: {order!r}")


def legal_picks(state: DraftState, pool_ids) -> tuple[int, ...]:
    """Pool minus everything already picked, ascending."""
    if state.terminal:
        raise ValueError("terminal draft has no legal picks")
    taken = set(state.picks_a) | set(state.picks_b)
    return tuple(sorted(i for i in pool_ids if i not in taken))
