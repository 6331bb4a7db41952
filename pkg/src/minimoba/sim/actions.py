"""Hierarchical action space: what / who / how_x / how_y heads."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..heroes import HeroSpec, SkillEffect


class ActionKind(IntEnum):
    """What-head entries. ILLEGAL/SUMMONER/COLLAB are reserved slots that are
    never legal; masks and samplers must cope with their presence."""

    ILLEGAL = 0
    NONE = 1
    MOVE = 2
    ATTACK = 3
    SKILL_1 = 4
    SKILL_2 = 5
    SKILL_3 = 6
    SKILL_4 = 7
    RECALL = 8
    RESTORE = 9
    SUMMONER = 10
    COLLAB = 11


N_WHAT = len(ActionKind)
SKILL_KINDS = (ActionKind.SKILL_1, ActionKind.SKILL_2, ActionKind.SKILL_3, ActionKind.SKILL_4)
_NEVER_LEGAL = (ActionKind.ILLEGAL, ActionKind.SUMMONER, ActionKind.COLLAB)


@dataclass(frozen=True)
class Action:
    """One hero's decision for a tick.

    who indexes the observation's unit stack (not global unit ids); how_x/how_y
    are direction bins. Components not relevant to `what` are ignored.
    """

    what: int
    who: int = 0
    how_x: int = 0
    how_y: int = 0

    @staticmethod
    def noop() -> "Action":
        return Action(what=int(ActionKind.NONE))


def head_relevance(what: int, hero: HeroSpec) -> tuple[bool, bool]:
    """(needs_who, needs_how) for a what-head choice by this hero."""
    kind = ActionKind(what)
    if kind == ActionKind.MOVE:
        return False, True
    if kind == ActionKind.ATTACK:
        return True, False
    if kind in SKILL_KINDS:
        idx = kind - ActionKind.SKILL_1
        if idx >= len(hero.skills):
            return False, False
        eff = hero.skills[idx].effect
        if eff == SkillEffect.BURST:
            return True, False
        if eff == SkillEffect.BOLT:
            return False, True
        return False, False
    return False, False


def never_legal_mask() -> np.ndarray:
    """Bool[N_WHAT], True where an entry may ever be legal."""
    m = np.ones(N_WHAT, dtype=bool)
    for k in _NEVER_LEGAL:
        m[int(k)] = False
    return m


# Direction bins: centers of a uniform grid over [-1, 1] per axis. The pair
# (how_x, how_y) is normalized to a unit vector at decode time.
def bin_centers(n_bins: int) -> np.ndarray:
    return np.linspace(-1.0, 1.0, n_bins, dtype=np.float64)


def decode_direction(how_x: int, how_y: int, n_bins: int, mirror: bool) -> tuple[float, float]:
    """Direction bins -> unit vector in world coordinates.

    Team B policies act in a mirrored frame, so their x component flips here.
    A (0, 0) vector decodes to standing still.
    """
    c = bin_centers(n_bins)
    dx = float(c[how_x])
    dy = float(c[how_y])
    if mirror:
        dx = -dx
    norm = float(np.hypot(dx, dy))
    if norm < 1e-9:
        return 0.0, 0.0
    return dx / norm, dy / norm
