"""Hero definitions: roles, skills, and the default desk-scale hero pool."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class Role(IntEnum):
    TANK = 0
    MARKSMAN = 1
    MAGE = 2
    SUPPORT = 3
    ASSASSIN = 4
    WARRIOR = 5


class SkillEffect(IntEnum):
    """What a skill does when cast."""

    BURST = 0   # targeted damage on a chosen enemy unit
    BOLT = 1    # directional projectile, damages first enemy unit hit
    HEAL = 2    # self heal
    HASTE = 3   # temporary self speed boost


@dataclass(frozen=True)
class SkillSpec:
    effect: SkillEffect
    cooldown: int           # ticks
    range: float            # cells (cast range / projectile travel)
    power: float            # damage or heal multiplier on hero attack stat
    mana_cost: float
    duration: int = 0       # buff duration in ticks (haste)


@dataclass(frozen=True)
class HeroSpec:
    hero_id: int
    name: str
    role: Role
    max_hp: float
    attack: float
    defense: float
    speed: float             # cells per tick
    attack_range: float
    attack_cooldown: int     # ticks between basic attacks
    max_mana: float
    skills: tuple[SkillSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.max_hp <= 0 or self.attack <= 0 or self.speed <= 0 or self.attack_range <= 0:
            raise ValueError(f"hero {self.hero_id}: stats must be strictly positive")
        if self.defense < 0:
            raise ValueError(f"hero {self.hero_id}: defense must be >= 0")
        if not 1 <= len(self.skills) <= 4:
            raise ValueError(f"hero {self.hero_id}: needs 1..4 skills, got {len(self.skills)}")

    @property
    def targeting_range(self) -> float:
        """Widest range over basic attack and all skills; drives target legality."""
        return max([self.attack_range] + [s.range for s in self.skills])


_ROLE_TEMPLATES: dict[Role, dict] = {
    Role.TANK: dict(max_hp=560, attack=26, defense=60, speed=0.40, attack_range=1.6,
                    attack_cooldown=3, max_mana=100),
    Role.MARKSMAN: dict(max_hp=340, attack=42, defense=15, speed=0.42, attack_range=5.0,
                        attack_cooldown=2, max_mana=100),
    Role.MAGE: dict(max_hp=300, attack=30, defense=10, speed=0.40, attack_range=4.2,
                    attack_cooldown=3, max_mana=130),
    Role.SUPPORT: dict(max_hp=330, attack=24, defense=20, speed=0.44, attack_range=3.8,
                       attack_cooldown=3, max_mana=130),
    Role.ASSASSIN: dict(max_hp=360, attack=40, defense=18, speed=0.50, attack_range=1.8,
                        attack_cooldown=2, max_mana=100),
    Role.WARRIOR: dict(max_hp=460, attack=34, defense=35, speed=0.44, attack_range=1.9,
                       attack_cooldown=3, max_mana=100),
}

_ROLE_SKILLS: dict[Role, tuple[SkillSpec, ...]] = {
    Role.TANK: (
        SkillSpec(SkillEffect.BURST, cooldown=40, range=2.5, power=1.6, mana_cost=25),
        SkillSpec(SkillEffect.HASTE, cooldown=80, range=0.0, power=1.5, mana_cost=20, duration=20),
    ),
    Role.MARKSMAN: (
        SkillSpec(SkillEffect.BOLT, cooldown=35, range=7.0, power=1.8, mana_cost=25),
    ),
    Role.MAGE: (
        SkillSpec(SkillEffect.BURST, cooldown=30, range=5.0, power=2.2, mana_cost=30),
        SkillSpec(SkillEffect.BOLT, cooldown=45, range=6.5, power=1.5, mana_cost=30),
    ),
    Role.SUPPORT: (
        SkillSpec(SkillEffect.HEAL, cooldown=50, range=0.0, power=5.0, mana_cost=30),
        SkillSpec(SkillEffect.HASTE, cooldown=60, range=0.0, power=1.4, mana_cost=20, duration=25),
    ),
    Role.ASSASSIN: (
        SkillSpec(SkillEffect.BURST, cooldown=25, range=3.0, power=2.0, mana_cost=20),
        SkillSpec(SkillEffect.HASTE, cooldown=60, range=0.0, power=1.6, mana_cost=20, duration=15),
    ),
    Role.WARRIOR: (
        SkillSpec(SkillEffect.BURST, cooldown=30, range=2.2, power=1.7, mana_cost=25),
        SkillSpec(SkillEffect.HEAL, cooldown=70, range=0.0, power=3.0, mana_cost=25),
    ),
}

# Default pool: all six roles covered, marksman/mage doubled up.
_DEFAULT_ROLES = [Role.TANK, Role.WARRIOR, Role.MARKSMAN, Role.MARKSMAN,
                  Role.MAGE, Role.MAGE, Role.SUPPORT, Role.ASSASSIN]


def build_hero(hero_id: int, role: Role, jitter_seed: int = 0) -> HeroSpec:
    """Parameterize a hero from its role template with deterministic stat jitter.

    Jitter keeps duplicated roles distinct without letting any hero dominate
    (multipliers stay within +/-6%).
    """
    rng = np.random.Generator(np.random.Philox(key=0xC0FFEE ^ jitter_seed,
                                               counter=[0, 0, 0, hero_id]))
    t = dict(_ROLE_TEMPLATES[role])
    for key in ("max_hp", "attack", "defense", "speed", "attack_range", "max_mana"):
        t[key] = round(float(t[key]) * float(rng.uniform(0.94, 1.06)), 3)
    return HeroSpec(
        hero_id=hero_id,
        name=f"{role.name.lower()}_{hero_id}",
        role=role,
        skills=_ROLE_SKILLS[role],
        **t,
    )


def default_hero_pool(size: int = 8, jitter_seed: int = 0) -> list[HeroSpec]:
    roles = [_DEFAULT_ROLES[i % len(_DEFAULT_ROLES)] for i in range(size)]
    return [build_hero(i, r, jitter_seed) for i, r in enumerate(roles)]
