"""Mutable match state as fixed-capacity struct-of-arrays."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields
from enum import IntEnum

import numpy as np

from ..config import EnvConfig
from ..heroes import HeroSpec
from .arena_map import ArenaMap

MAX_PROJECTILES = 32
ASSIST_WINDOW = 100          # ticks a damager stays eligible for an assist
EXPOSE_COOLDOWN = 100        # min ticks between expose rewards per hero
BUFF_TICKS = 400
TYRANT_BUFF_MULT = 1.15
OVERLORD_BUFF_MULT = 1.25
LEVEL_CAP = 15


class UnitKind(IntEnum):
    HERO = 0
    MINION = 1
    TURRET = 2
    BASE = 3
    MONSTER = 4


N_UNIT_KINDS = len(UnitKind)


@dataclass
class GameState:
    """All dynamic match data. Every field is either a scalar or an ndarray so
    the state can be cloned, hashed, and diffed mechanically."""

    tick: int
    seed: int
    winner: int                      # -1 running, 0/1 team win, 2 horizon draw
    # unit arrays, fixed layout: heroes | turrets | bases | monsters | minions
    kind: np.ndarray                 # int8 [U]
    team: np.ndarray                 # int8 [U], -1 neutral
    hero_id: np.ndarray              # int16 [U], pool id for heroes else -1
    x: np.ndarray                    # f32 [U]
    y: np.ndarray                    # f32 [U]
    hp: np.ndarray                   # f32 [U]
    max_hp: np.ndarray               # f32 [U]
    alive: np.ndarray                # bool [U]
    attack: np.ndarray               # f32 [U]
    defense: np.ndarray              # f32 [U]
    speed: np.ndarray                # f32 [U]
    atk_range: np.ndarray            # f32 [U]
    atk_cd_max: np.ndarray           # int16 [U]
    atk_cd: np.ndarray               # int16 [U]
    aggro: np.ndarray                # int16 [U], unit idx or -1
    # hero-only arrays [n_heroes]
    mana: np.ndarray                 # f32
    max_mana: np.ndarray             # f32
    gold: np.ndarray                 # f32
    exp: np.ndarray                  # f32
    level: np.ndarray                # int16
    base_attack: np.ndarray          # f32, level-1 stat the level curve scales
    base_max_hp: np.ndarray          # f32
    respawn_cd: np.ndarray           # int16, >0 while dead
    skill_cd: np.ndarray             # int16 [n_heroes, 4]
    haste_ticks: np.ndarray          # int16
    haste_mult: np.ndarray           # f32
    recall_left: np.ndarray          # int16, -1 idle
    restore_cd: np.ndarray           # int16
    hit_timer: np.ndarray            # int16 [n_heroes, n_heroes]; [victim, attacker]
    last_attacker: np.ndarray        # int16, unit idx or -1
    visible_prev: np.ndarray         # bool, visible to enemy team last tick
    expose_cd: np.ndarray            # int16
    spawn_x: np.ndarray              # f32, fountain/respawn point per hero
    spawn_y: np.ndarray              # f32
    # team arrays [2]
    team_kills: np.ndarray           # int16
    team_buff_mult: np.ndarray       # f32
    team_buff_ticks: np.ndarray      # int16
    # monster respawn clocks [2]
    monster_respawn_cd: np.ndarray   # int16
    # projectile pool
    proj_alive: np.ndarray           # bool [P]
    proj_team: np.ndarray            # int8 [P]
    proj_owner: np.ndarray           # int16 [P]
    proj_x: np.ndarray               # f32 [P]
    proj_y: np.ndarray               # f32 [P]
    proj_dx: np.ndarray              # f32 [P]
    proj_dy: np.ndarray              # f32 [P]
    proj_power: np.ndarray           # f32 [P]
    proj_ttl: np.ndarray             # int16 [P]

    def clone(self) -> "GameState":
        kw = {}
        for f in fields(self):
            v = getattr(self, f.name)
            kw[f.name] = v.copy() if isinstance(v, np.ndarray) else v
        return GameState(**kw)

    def digest(self) -> str:
        """Order-stable hash of the full dynamic state."""
        h = hashlib.sha256()
        for f in fields(self):
            v = getattr(self, f.name)
            h.update(f.name.encode())
            if isinstance(v, np.ndarray):
                h.update(np.ascontiguousarray(v).tobytes())
            else:
                h.update(str(v).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class Layout:
    """Unit index ranges for the fixed struct-of-arrays layout."""

    n_heroes: int
    n_turrets: int                   # per side
    n_minions: int                   # per side
    hero0: int = 0

    @property
    def turret0(self) -> int:
        return self.n_heroes

    @property
    def base0(self) -> int:
        return self.turret0 + 2 * self.n_turrets

    @property
    def monster0(self) -> int:
        return self.base0 + 2

    @property
    def minion0(self) -> int:
        return self.monster0 + 2

    @property
    def n_units(self) -> int:
        return self.minion0 + 2 * self.n_minions

    def base_of(self, team: int) -> int:
        return self.base0 + team

    def hero_slots(self, team: int) -> range:
        n = self.n_heroes // 2
        return range(team * n, (team + 1) * n)

    def turret_slots(self, team: int) -> range:
        return range(self.turret0 + team * self.n_turrets,
                     self.turret0 + (team + 1) * self.n_turrets)

    def minion_slots(self, team: int) -> range:
        return range(self.minion0 + team * self.n_minions,
                     self.minion0 + (team + 1) * self.n_minions)


def make_layout(cfg: EnvConfig) -> Layout:
    return Layout(n_heroes=2 * cfg.team_size, n_turrets=cfg.turrets_per_side,
                  n_minions=cfg.max_minions_per_side)


def init_state(cfg: EnvConfig, arena: ArenaMap, heroes: list[HeroSpec], seed: int) -> GameState:
    """Fresh tick-0 state. `heroes` is team A's lineup then team B's."""
    lay = make_layout(cfg)
    n, U, P = lay.n_heroes, lay.n_units, MAX_PROJECTILES
    if len(heroes) != n:
        raise ValueError(f"expected {n} heroes, got {len(heroes)}")

    f32 = lambda shape, fill=0.0: np.full(shape, fill, dtype=np.float32)
    i16 = lambda shape, fill=0: np.full(shape, fill, dtype=np.int16)

    s = GameState(
        tick=0, seed=int(seed), winner=-1,
        kind=np.zeros(U, dtype=np.int8),
        team=np.full(U, -1, dtype=np.int8),
        hero_id=np.full(U, -1, dtype=np.int16),
        x=f32(U), y=f32(U), hp=f32(U), max_hp=f32(U, 1.0),
        alive=np.zeros(U, dtype=bool),
        attack=f32(U), defense=f32(U), speed=f32(U), atk_range=f32(U, 1.0),
        atk_cd_max=i16(U, 1), atk_cd=i16(U), aggro=i16(U, -1),
        mana=f32(n), max_mana=f32(n, 1.0), gold=f32(n), exp=f32(n),
        level=i16(n, 1), base_attack=f32(n), base_max_hp=f32(n),
        respawn_cd=i16(n), skill_cd=i16((n, 4)),
        haste_ticks=i16(n), haste_mult=f32(n, 1.0),
        recall_left=i16(n, -1), restore_cd=i16(n),
        hit_timer=i16((n, n)), last_attacker=i16(n, -1),
        visible_prev=np.zeros(n, dtype=bool), expose_cd=i16(n),
        spawn_x=f32(n), spawn_y=f32(n),
        team_kills=i16(2), team_buff_mult=f32(2, 1.0), team_buff_ticks=i16(2),
        monster_respawn_cd=i16(2),
        proj_alive=np.zeros(P, dtype=bool),
        proj_team=np.full(P, -1, dtype=np.int8),
        proj_owner=np.full(P, -1, dtype=np.int16),
        proj_x=f32(P), proj_y=f32(P), proj_dx=f32(P), proj_dy=f32(P),
        proj_power=f32(P), proj_ttl=i16(P),
    )

    # heroes
    half = cfg.team_size
    for i, spec in enumerate(heroes):
        team = 0 if i < half else 1
        s.kind[i] = UnitKind.HERO
        s.team[i] = team
        s.hero_id[i] = spec.hero_id
        bx, by = arena.base_pos[team]
        lane_off = (i % half) - (half - 1) / 2.0
        s.x[i] = s.spawn_x[i] = bx + (1.5 if team == 0 else -1.5)
        s.y[i] = s.spawn_y[i] = by + 1.5 * lane_off
        s.hp[i] = s.max_hp[i] = spec.max_hp
        s.alive[i] = True
        s.attack[i] = spec.attack
        s.defense[i] = spec.defense
        s.speed[i] = spec.speed
        s.atk_range[i] = spec.attack_range
        s.atk_cd_max[i] = spec.attack_cooldown
        s.mana[i] = s.max_mana[i] = spec.max_mana
        s.base_attack[i] = spec.attack
        s.base_max_hp[i] = spec.max_hp

    # turrets
    for t, (tx, ty) in zip(range(lay.turret0, lay.base0), arena.turret_pos):
        team = 0 if (t - lay.turret0) < lay.n_turrets else 1
        s.kind[t] = UnitKind.TURRET
        s.team[t] = team
        s.x[t], s.y[t] = tx, ty
        s.hp[t] = s.max_hp[t] = cfg.turret_hp
        s.alive[t] = True
        s.attack[t] = cfg.turret_attack
        s.defense[t] = 30.0
        s.atk_range[t] = cfg.turret_range
        s.atk_cd_max[t] = cfg.turret_cooldown

    # bases
    for team in (0, 1):
        b = lay.base_of(team)
        s.kind[b] = UnitKind.BASE
        s.team[b] = team
        s.x[b], s.y[b] = arena.base_pos[team]
        s.hp[b] = s.max_hp[b] = cfg.base_hp
        s.alive[b] = True
        s.defense[b] = 30.0
        s.atk_range[b] = 0.5

    # monsters: 0 = tyrant (small buff), 1 = overlord (big buff)
    for m in (0, 1):
        u = lay.monster0 + m
        s.kind[u] = UnitKind.MONSTER
        s.team[u] = -1
        s.x[u], s.y[u] = arena.camp_pos[m]
        s.hp[u] = s.max_hp[u] = cfg.monster_hp * (1.0 if m == 0 else 1.6)
        s.alive[u] = True
        s.attack[u] = cfg.monster_attack
        s.defense[u] = 20.0
        s.speed[u] = 0.35
        s.atk_range[u] = 1.8
        s.atk_cd_max[u] = 3

    # minion slots start empty
    for u in range(lay.minion0, lay.n_units):
        s.kind[u] = UnitKind.MINION
        s.team[u] = 0 if (u - lay.minion0) < lay.n_minions else 1
        s.max_hp[u] = cfg.minion_hp
    return s
