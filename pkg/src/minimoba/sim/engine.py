"""Tick-based match engine.

Step stages run in a fixed order so identical (state, actions, seed) always
produce identical successor states:

  1. advance tick, derive the per-tick RNG stream
  2. tick down cooldowns, timers, buffs
  3. regen / passive income / fountain healing
  4. hero actions, in hero-slot order (team A slots first)
  5. projectile flight and hits
  6. minion wave spawning, then minion AI in slot order
  7. turret AI
  8. neutral monster AI and respawns
  9. hero respawns
 10. visibility update and expose-reward detection
 11. dense stat-delta rewards (gold/exp/mana/health quartics, no-op)
 12. terminal check (base destroyed or horizon reached)

Deaths are credited inline at the damage site, so kill/assist/last-hit
ordering follows damage ordering. All randomness flows through a counter-based
generator keyed by (match seed, tick); no RNG state is carried across ticks.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..config import REWARD_HEADS, REWARD_ITEMS, EnvConfig
from ..heroes import HeroSpec, SkillEffect
from ..util import philox
from .actions import Action, ActionKind, SKILL_KINDS, decode_direction, head_relevance
from .arena_map import ArenaMap, build_map
from .observe import ObsBuilder, Observation
from .state import (ASSIST_WINDOW, BUFF_TICKS, EXPOSE_COOLDOWN, LEVEL_CAP,
                    MAX_PROJECTILES, OVERLORD_BUFF_MULT, TYRANT_BUFF_MULT,
                    GameState, Layout, UnitKind, init_state, make_layout)

TURRET_GOLD = 150.0
FOUNTAIN_RADIUS = 4.0
FOUNTAIN_HP_REGEN = 0.02      # fraction of max hp per tick
FOUNTAIN_MANA_REGEN = 3.0
MONSTER_LEASH = 6.0
MONSTER_CAMP_REGEN = 0.02
MINION_AGGRO_RADIUS = 3.0
PROJ_SPEED = 1.0
PROJ_HIT_RADIUS = 0.8
HEAD_INDEX = {h: i for i, h in enumerate(REWARD_HEADS)}
# plain ints for hot-loop kind tests (enum attribute access is surprisingly slow)
K_TURRET = int(UnitKind.TURRET)
K_BASE = int(UnitKind.BASE)
K_MONSTER = int(UnitKind.MONSTER)


class ActionError(ValueError):
    """Raised when a submitted action violates its legality mask. The message
    names the offending head so harness bugs are easy to localize."""


class MobaEnv:
    """Symmetric N-vs-N lane arena with shared team vision and fog."""

    def __init__(self, cfg: EnvConfig, lineup_a: Sequence[HeroSpec],
                 lineup_b: Sequence[HeroSpec], seed: int = 0):
        if len(lineup_a) != cfg.team_size or len(lineup_b) != cfg.team_size:
            raise ValueError("lineup sizes must match cfg.team_size")
        for lu in (lineup_a, lineup_b):
            ids = [h.hero_id for h in lu]
            if len(set(ids)) != len(ids):
                raise ValueError("duplicate hero within one team")
        self.cfg = cfg
        self.arena: ArenaMap = build_map(cfg)
        self.lay: Layout = make_layout(cfg)
        self.heroes: list[HeroSpec] = list(lineup_a) + list(lineup_b)
        self.seed = int(seed)
        self._obs = ObsBuilder(cfg, self.arena, self.lay, self.heroes)
        self.s: GameState = init_state(cfg, self.arena, self.heroes, self.seed)
        self._visible = self._compute_visibility()
        self._respawned = np.zeros(self.lay.n_heroes, dtype=bool)
        self._events: list[tuple[int, str, float]] = []
        self._mask_cache: dict = {}
        self._turrets_alive = self._count_turrets()

    # ------------------------------------------------------------- lifecycle

    def reset(self, seed: int | None = None, build_obs: bool = True):
        if seed is not None:
            self.seed = int(seed)
        self.s = init_state(self.cfg, self.arena, self.heroes, self.seed)
        self._visible = self._compute_visibility()
        self._mask_cache = {}
        self._turrets_alive = self._count_turrets()
        self.s.visible_prev[:] = self._hero_visibility()
        return self._build_obs() if build_obs else None

    def clone(self) -> "MobaEnv":
        env = object.__new__(MobaEnv)
        env.cfg = self.cfg
        env.arena = self.arena
        env.lay = self.lay
        env.heroes = self.heroes
        env.seed = self.seed
        env._obs = self._obs
        env.s = self.s.clone()
        env._visible = self._visible.copy()
        env._respawned = self._respawned.copy()
        env._events = []
        env._mask_cache = {}
        env._turrets_alive = env._count_turrets()
        return env

    def state_hash(self) -> str:
        return self.s.digest()

    @property
    def done(self) -> bool:
        return self.s.winner != -1

    @property
    def winner(self) -> int:
        return int(self.s.winner)

    # ------------------------------------------------------------------ step

    def step(self, actions: Sequence[Action], build_obs: bool = True):
        """Advance one tick. Returns (obs_list, rewards[n,5] float64, done, info).

        build_obs=False skips the per-hero observation tensors (obs comes back
        None); scripted players that read state directly run ~3x faster that way.
        State evolution is identical either way.
        """
        s, lay, cfg = self.s, self.lay, self.cfg
        n = lay.n_heroes
        if s.winner != -1:
            raise RuntimeError("step() after terminal state")
        if len(actions) != n:
            raise ValueError(f"need {n} actions, got {len(actions)}")
        masks = [self.masks(h) for h in range(n)]
        for h, act in enumerate(actions):
            self._validate(h, act, masks[h])

        self._events = []
        self._respawned[:] = False
        s.tick += 1
        rng = philox(s.seed, s.tick)

        # snapshots for dense deltas
        prev_alive = s.alive[:n].copy()
        prev_gold = s.gold.astype(np.float64).copy()
        prev_exp = s.exp.astype(np.float64).copy()
        prev_hpq = self._quartic(s.hp[:n], s.max_hp[:n])
        prev_manaq = self._quartic(s.mana, s.max_mana)

        self._tick_timers()
        self._regen()
        for h in range(n):
            self._hero_act(h, actions[h], rng)
        self._advance_projectiles(rng)
        self._minions(rng)
        self._turrets(rng)
        self._monsters(rng)
        self._respawns()
        self._visible = self._compute_visibility()
        self._expose_rewards()
        self._dense_rewards(prev_alive, prev_gold, prev_exp, prev_hpq, prev_manaq)
        if s.winner == -1 and s.tick >= cfg.horizon:
            s.winner = 2

        rewards = self._reduce_rewards()
        done = s.winner != -1
        info = {
            "tick": s.tick,
            "events": list(self._events),
            "winner": int(s.winner),
        }
        obs = self._build_obs() if build_obs else None
        return obs, rewards, done, info

    # ------------------------------------------------------------ validation

    def _validate(self, h: int, act: Action, masks) -> None:
        mask_what, mask_who = masks
        if not (0 <= act.what < mask_what.shape[0]):
            raise ActionError(f"hero {h}: what-head out of range: {act.what}")
        if not mask_what[act.what]:
            raise ActionError(
                f"hero {h}: what-head violation: {ActionKind(act.what).name} is masked")
        needs_who, needs_how = head_relevance(act.what, self.heroes[h])
        if needs_who:
            if not (0 <= act.who < mask_who.shape[0]):
                raise ActionError(f"hero {h}: who-head out of range: {act.who}")
            if not mask_who[act.who]:
                raise ActionError(f"hero {h}: who-head violation: slot {act.who} is masked")
        if needs_how:
            nb = self.cfg.n_move_bins
            if not (0 <= act.how_x < nb):
                raise ActionError(f"hero {h}: how_x-head out of range: {act.how_x}")
            if not (0 <= act.how_y < nb):
                raise ActionError(f"hero {h}: how_y-head out of range: {act.how_y}")

    def masks(self, h: int):
        """Current-tick legality masks for hero h: (what[N_WHAT], who[K]).

        Cached per tick: legality only changes when the state advances, and
        both the acting player and step() validation want the same masks.
        """
        key = (self.s.tick, h)
        hit = self._mask_cache.get(key)
        if hit is None:
            if self._mask_cache and next(iter(self._mask_cache))[0] != self.s.tick:
                self._mask_cache.clear()
            hit = self._obs.action_masks(self.s, self._visible, h,
                                         self._base_vulnerable())
            self._mask_cache[key] = hit
        return hit

    def stack_unit(self, h: int, slot: int) -> int:
        """Unit index behind who-slot `slot` of hero h's target stack."""
        return self._obs.stack_unit(self.s, h, slot)

    # ------------------------------------------------------------- stages

    def _tick_timers(self):
        s = self.s
        for arr in (s.atk_cd, s.skill_cd, s.restore_cd, s.haste_ticks,
                    s.hit_timer, s.expose_cd, s.team_buff_ticks):
            np.maximum(arr - 1, 0, out=arr)
        s.team_buff_mult[s.team_buff_ticks == 0] = 1.0

    def _regen(self):
        s, cfg, lay = self.s, self.cfg, self.lay
        n = lay.n_heroes
        for h in range(n):
            if not s.alive[h]:
                continue
            s.hp[h] = min(s.max_hp[h], s.hp[h] + cfg.hp_regen_frac * s.max_hp[h])
            s.mana[h] = min(s.max_mana[h], s.mana[h] + cfg.mana_regen)
            s.gold[h] += cfg.passive_gold
            s.exp[h] += cfg.passive_exp
            self._maybe_level_up(h)
            bx, by = self.arena.base_pos[s.team[h]]
            if math.hypot(s.x[h] - bx, s.y[h] - by) <= FOUNTAIN_RADIUS:
                s.hp[h] = min(s.max_hp[h], s.hp[h] + FOUNTAIN_HP_REGEN * s.max_hp[h])
                s.mana[h] = min(s.max_mana[h], s.mana[h] + FOUNTAIN_MANA_REGEN)

    def _maybe_level_up(self, h: int):
        s, cfg = self.s, self.cfg
        new_level = min(LEVEL_CAP, 1 + int(s.exp[h] / cfg.level_exp))
        while s.level[h] < new_level:
            s.level[h] += 1
            mult = (1.0 + cfg.level_stat_gain) ** (s.level[h] - 1)
            s.attack[h] = s.base_attack[h] * mult
            new_max = s.base_max_hp[h] * mult
            s.hp[h] += new_max - s.max_hp[h]
            s.max_hp[h] = new_max

    def _hero_act(self, h: int, act: Action, rng):
        s, cfg = self.s, self.cfg
        if not s.alive[h]:
            return
        kind = ActionKind(act.what)
        if kind != ActionKind.NONE and s.recall_left[h] >= 0:
            s.recall_left[h] = -1    # any non-idle action cancels the channel
        if kind == ActionKind.NONE:
            self._emit(h, "no_op", 1.0)
            if s.recall_left[h] > 0:
                s.recall_left[h] -= 1
                if s.recall_left[h] == 0:
                    s.recall_left[h] = -1
                    s.x[h], s.y[h] = s.spawn_x[h], s.spawn_y[h]
            return
        if kind == ActionKind.MOVE:
            dx, dy = decode_direction(act.how_x, act.how_y, cfg.n_move_bins,
                                      mirror=s.team[h] == 1)
            self._try_move(h, dx, dy, self._speed(h))
            return
        if kind == ActionKind.ATTACK:
            target = self._resolve_target(h, act.who)
            if target >= 0:
                self._attack_or_approach(h, target, rng)
            return
        if kind in SKILL_KINDS:
            self._cast(h, kind - ActionKind.SKILL_1, act, rng)
            return
        if kind == ActionKind.RECALL:
            s.recall_left[h] = cfg.recall_ticks
            return
        if kind == ActionKind.RESTORE:
            s.restore_cd[h] = cfg.restore_ticks
            s.hp[h] = min(s.max_hp[h], s.hp[h] + cfg.restore_frac * s.max_hp[h])
            s.mana[h] = min(s.max_mana[h], s.mana[h] + cfg.restore_frac * s.max_mana[h])
            return
        raise AssertionError(f"unhandled action kind {kind!r}")

    def _resolve_target(self, h: int, who_slot: int) -> int:
        """Map a unit-stack slot back to a unit index; -1 if it died this tick."""
        u = self._obs.stack_unit(self.s, h, who_slot)
        if u < 0 or not self.s.alive[u]:
            return -1
        return int(u)

    def _attack_or_approach(self, h: int, target: int, rng):
        s = self.s
        d = self._dist(h, target)
        if d <= s.atk_range[h]:
            if s.atk_cd[h] == 0:
                s.atk_cd[h] = s.atk_cd_max[h]
                self._deal_damage(h, target, self._attack_power(h), rng)
        else:
            dx, dy = s.x[target] - s.x[h], s.y[target] - s.y[h]
            norm = math.hypot(dx, dy)
            if norm > 1e-9:
                self._try_move(h, dx / norm, dy / norm, self._speed(h))

    def _cast(self, h: int, slot: int, act: Action, rng):
        s, cfg = self.s, self.cfg
        spec = self.heroes[h].skills[slot]
        if s.skill_cd[h, slot] > 0 or s.mana[h] < spec.mana_cost:
            return
        if spec.effect == SkillEffect.BURST:
            target = self._resolve_target(h, act.who)
            if target < 0:
                return
            if self._dist(h, target) > spec.range:
                # out of cast range: close the gap instead, keep the skill
                dx, dy = s.x[target] - s.x[h], s.y[target] - s.y[h]
                norm = math.hypot(dx, dy)
                if norm > 1e-9:
                    self._try_move(h, dx / norm, dy / norm, self._speed(h))
                return
            s.skill_cd[h, slot] = spec.cooldown
            s.mana[h] -= spec.mana_cost
            self._deal_damage(h, target, spec.power * self._attack_power(h), rng)
            return
        s.skill_cd[h, slot] = spec.cooldown
        s.mana[h] -= spec.mana_cost
        if spec.effect == SkillEffect.BOLT:
            dx, dy = decode_direction(act.how_x, act.how_y, cfg.n_move_bins,
                                      mirror=s.team[h] == 1)
            if dx == 0.0 and dy == 0.0:
                dx = 1.0 if s.team[h] == 0 else -1.0
            p = self._free_projectile()
            if p >= 0:
                s.proj_alive[p] = True
                s.proj_team[p] = s.team[h]
                s.proj_owner[p] = h
                s.proj_x[p], s.proj_y[p] = s.x[h], s.y[h]
                s.proj_dx[p], s.proj_dy[p] = dx, dy
                s.proj_power[p] = spec.power * self._attack_power(h)
                s.proj_ttl[p] = int(math.ceil(spec.range / PROJ_SPEED))
            return
        if spec.effect == SkillEffect.HEAL:
            s.hp[h] = min(s.max_hp[h], s.hp[h] + spec.power * self._attack_power(h))
            return
        if spec.effect == SkillEffect.HASTE:
            s.haste_ticks[h] = spec.duration
            s.haste_mult[h] = spec.power
            return
        raise AssertionError(f"unhandled skill effect {spec.effect!r}")

    def _free_projectile(self) -> int:
        idx = np.flatnonzero(~self.s.proj_alive)
        return int(idx[0]) if idx.size else -1

    def _advance_projectiles(self, rng):
        s, lay = self.s, self.lay
        for p in range(MAX_PROJECTILES):
            if not s.proj_alive[p]:
                continue
            s.proj_x[p] += s.proj_dx[p] * PROJ_SPEED
            s.proj_y[p] += s.proj_dy[p] * PROJ_SPEED
            s.proj_ttl[p] -= 1
            if not (0 <= s.proj_x[p] < self.arena.width and 0 <= s.proj_y[p] < self.arena.height):
                s.proj_alive[p] = False
                continue
            best, best_d = -1, PROJ_HIT_RADIUS
            for u in range(lay.n_units):
                if not s.alive[u] or s.team[u] == s.proj_team[p]:
                    continue
                if s.kind[u] == UnitKind.BASE and not self._base_vulnerable()[s.team[u]]:
                    continue
                d = math.hypot(s.x[u] - s.proj_x[p], s.y[u] - s.proj_y[p])
                if d <= best_d:
                    best, best_d = u, d
            if best >= 0:
                owner = int(s.proj_owner[p])
                s.proj_alive[p] = False
                if s.alive[owner]:
                    self._deal_damage(owner, best, s.proj_power[p], rng)
                continue
            if s.proj_ttl[p] <= 0:
                s.proj_alive[p] = False

    def _minions(self, rng):
        s, cfg, lay = self.s, self.cfg, self.lay
        if s.tick % cfg.wave_period == 1:
            for team in (0, 1):
                free = [u for u in lay.minion_slots(team) if not s.alive[u]]
                for j in range(min(cfg.wave_size, len(free))):
                    u = free[j]
                    bx, by = self.arena.base_pos[team]
                    s.alive[u] = True
                    s.hp[u] = s.max_hp[u] = cfg.minion_hp
                    s.x[u] = bx + (2.0 if team == 0 else -2.0)
                    s.y[u] = by + (0.8 if j % 2 else -0.8)
                    s.attack[u] = cfg.minion_attack
                    s.defense[u] = 0.0
                    s.speed[u] = cfg.minion_speed
                    s.atk_range[u] = cfg.minion_range
                    s.atk_cd_max[u] = cfg.minion_cooldown
                    s.atk_cd[u] = 0
                    s.aggro[u] = -1
        for u in range(lay.minion0, lay.n_units):
            if not s.alive[u]:
                continue
            team = int(s.team[u])
            tgt = self._nearest_enemy(u, MINION_AGGRO_RADIUS, include_structures=True)
            if tgt >= 0:
                if self._dist(u, tgt) <= s.atk_range[u]:
                    if s.atk_cd[u] == 0:
                        s.atk_cd[u] = s.atk_cd_max[u]
                        self._deal_damage(u, tgt, float(s.attack[u]), rng)
                else:
                    self._step_toward(u, s.x[tgt], s.y[tgt])
            else:
                ex, ey = self.arena.base_pos[1 - team]
                self._step_toward(u, ex, ey)

    def _turrets(self, rng):
        s, lay = self.s, self.lay
        for u in range(lay.turret0, lay.base0):
            if not s.alive[u] or s.atk_cd[u] > 0:
                continue
            # prefer minions so heroes can push behind a wave
            tgt = self._nearest_enemy(u, float(s.atk_range[u]), kinds=(UnitKind.MINION,))
            if tgt < 0:
                tgt = self._nearest_enemy(u, float(s.atk_range[u]), kinds=(UnitKind.HERO,))
            if tgt >= 0:
                s.atk_cd[u] = s.atk_cd_max[u]
                self._deal_damage(u, tgt, float(s.attack[u]), rng)

    def _monsters(self, rng):
        s, cfg, lay = self.s, self.cfg, self.lay
        for m in (0, 1):
            u = lay.monster0 + m
            cx, cy = self.arena.camp_pos[m]
            if not s.alive[u]:
                if s.monster_respawn_cd[m] > 0:
                    s.monster_respawn_cd[m] -= 1
                    if s.monster_respawn_cd[m] == 0:
                        s.alive[u] = True
                        s.hp[u] = s.max_hp[u]
                        s.x[u], s.y[u] = cx, cy
                        s.aggro[u] = -1
                continue
            tgt = int(s.aggro[u])
            leashed = math.hypot(s.x[u] - cx, s.y[u] - cy) > MONSTER_LEASH
            if tgt >= 0 and (not s.alive[tgt] or self._dist(u, tgt) > MONSTER_LEASH or leashed):
                s.aggro[u] = tgt = -1
            if tgt < 0:
                if math.hypot(s.x[u] - cx, s.y[u] - cy) > 0.5:
                    self._step_toward(u, cx, cy)
                else:
                    s.hp[u] = min(s.max_hp[u], s.hp[u] + MONSTER_CAMP_REGEN * s.max_hp[u])
                continue
            if self._dist(u, tgt) <= s.atk_range[u]:
                if s.atk_cd[u] == 0:
                    s.atk_cd[u] = s.atk_cd_max[u]
                    self._deal_damage(u, tgt, float(s.attack[u]), rng)
            else:
                self._step_toward(u, s.x[tgt], s.y[tgt])

    def _respawns(self):
        s, lay = self.s, self.lay
        for h in range(lay.n_heroes):
            if s.alive[h] or s.respawn_cd[h] == 0:
                continue
            s.respawn_cd[h] -= 1
            if s.respawn_cd[h] == 0:
                s.alive[h] = True
                s.hp[h] = s.max_hp[h]
                s.mana[h] = s.max_mana[h]
                s.x[h], s.y[h] = s.spawn_x[h], s.spawn_y[h]
                s.recall_left[h] = -1
                s.last_attacker[h] = -1
                self._respawned[h] = True

    def _expose_rewards(self):
        s, lay = self.s, self.lay
        vis = self._hero_visibility()
        for j in range(lay.n_heroes):
            if (vis[j] and not s.visible_prev[j] and s.alive[j]
                    and s.expose_cd[j] == 0):
                s.expose_cd[j] = EXPOSE_COOLDOWN
                enemy = 1 - int(s.team[j])
                for h in lay.hero_slots(enemy):
                    if s.alive[h]:
                        self._emit(h, "expose_invisible_enemy", 1.0)
        s.visible_prev[:] = vis

    def _dense_rewards(self, prev_alive, prev_gold, prev_exp, prev_hpq, prev_manaq):
        s, lay = self.s, self.lay
        n = lay.n_heroes
        hpq = self._quartic(s.hp[:n], s.max_hp[:n])
        manaq = self._quartic(s.mana, s.max_mana)
        for h in range(n):
            dg = float(s.gold[h]) - prev_gold[h]
            if dg != 0.0:
                self._emit(h, "gold", dg)
            de = float(s.exp[h]) - prev_exp[h]
            if de != 0.0:
                self._emit(h, "experience", de)
            if prev_alive[h] and s.alive[h] and not self._respawned[h]:
                dhp = float(hpq[h] - prev_hpq[h])
                if dhp != 0.0:
                    self._emit(h, "health_point", dhp)
                dm = float(manaq[h] - prev_manaq[h])
                if dm != 0.0:
                    self._emit(h, "mana", dm)

    # -------------------------------------------------------------- helpers

    @staticmethod
    def _quartic(v: np.ndarray, vmax: np.ndarray) -> np.ndarray:
        frac = np.asarray(v, dtype=np.float64) / np.asarray(vmax, dtype=np.float64)
        return frac ** 4

    def _speed(self, h: int) -> float:
        s = self.s
        mult = float(s.haste_mult[h]) if s.haste_ticks[h] > 0 else 1.0
        return float(s.speed[h]) * mult

    def _attack_power(self, h: int) -> float:
        s = self.s
        return float(s.attack[h]) * float(s.team_buff_mult[s.team[h]])

    def _dist(self, a: int, b: int) -> float:
        s = self.s
        return math.hypot(float(s.x[a] - s.x[b]), float(s.y[a] - s.y[b]))

    def _try_move(self, u: int, dx: float, dy: float, dist: float):
        """Move with wall slide: try the full vector, then each axis alone."""
        s, arena = self.s, self.arena
        for vx, vy in ((dx, dy), (dx, 0.0), (0.0, dy)):
            if vx == 0.0 and vy == 0.0:
                continue
            nx = float(np.clip(s.x[u] + vx * dist, 0.5, arena.width - 0.5))
            ny = float(np.clip(s.y[u] + vy * dist, 0.5, arena.height - 0.5))
            if not arena.blocked(nx, ny):
                s.x[u], s.y[u] = nx, ny
                return

    def _step_toward(self, u: int, tx: float, ty: float):
        s = self.s
        dx, dy = tx - float(s.x[u]), ty - float(s.y[u])
        norm = math.hypot(dx, dy)
        if norm > 1e-9:
            self._try_move(u, dx / norm, dy / norm, min(float(s.speed[u]), norm))

    def _nearest_enemy(self, u: int, radius: float, kinds=None,
                       include_structures: bool = False) -> int:
        s = self.s
        team = int(s.team[u])
        m = s.alive.copy()
        m[u] = False
        m &= ~((s.team == team) | ((s.team == -1) & (s.kind == K_MONSTER)))
        if kinds is not None:
            km = np.zeros_like(m)
            for k in kinds:
                km |= s.kind == int(k)
            m &= km
        elif not include_structures:
            m &= (s.kind != K_TURRET) & (s.kind != K_BASE)
        if m.any():
            vul = self._base_vulnerable()
            for t in (0, 1):
                b = self.lay.base_of(t)
                if m[b] and not vul[t]:
                    m[b] = False
        idx = np.flatnonzero(m)
        if idx.size == 0:
            return -1
        # diffs in f32 to match scalar arithmetic, distance in f64
        d = np.hypot((s.x[idx] - s.x[u]).astype(np.float64),
                     (s.y[idx] - s.y[u]).astype(np.float64))
        ok = d <= radius
        if not ok.any():
            return -1
        idx, d = idx[ok], d[ok]
        # equal distances resolve to the highest unit index (scan order)
        return int(idx[np.flatnonzero(d == d.min())[-1]])

    def _base_vulnerable(self) -> np.ndarray:
        """A base can only take damage once all of its turrets are down.
        Tracked incrementally: _on_death keeps the per-team turret count."""
        return self._turrets_alive == 0

    def _count_turrets(self) -> np.ndarray:
        s, lay = self.s, self.lay
        return np.array([sum(bool(s.alive[t]) for t in lay.turret_slots(team))
                         for team in (0, 1)], dtype=np.int32)

    def _deal_damage(self, src: int, dst: int, raw: float, rng):
        s, cfg, lay = self.s, self.cfg, self.lay
        if not s.alive[dst]:
            return
        if s.kind[dst] == UnitKind.BASE and not self._base_vulnerable()[s.team[dst]]:
            return
        spread = float(rng.uniform(1.0 - cfg.damage_spread, 1.0 + cfg.damage_spread))
        dmg = raw * 100.0 / (100.0 + float(s.defense[dst])) * spread
        applied = min(dmg, float(s.hp[dst]))
        s.hp[dst] -= dmg
        src_hero = src < lay.n_heroes and s.kind[src] == UnitKind.HERO
        dst_kind = UnitKind(int(s.kind[dst]))
        if dst_kind == UnitKind.HERO:
            s.last_attacker[dst] = src
            s.recall_left[dst] = -1
            if src_hero and s.team[src] != s.team[dst]:
                s.hit_timer[dst, src] = ASSIST_WINDOW
                self._emit(src, "hurt_to_hero", applied / float(s.max_hp[dst]))
        elif src_hero:
            if dst_kind == UnitKind.TURRET:
                self._emit(src, "attack_turret", applied / float(s.max_hp[dst]))
            elif dst_kind == UnitKind.BASE:
                self._emit(src, "attack_base", applied / float(s.max_hp[dst]))
            elif dst_kind == UnitKind.MONSTER:
                self._emit(src, "attack_monster", applied / float(s.max_hp[dst]))
        if dst_kind == UnitKind.MONSTER and s.hp[dst] > 0.0:
            s.aggro[dst] = src
        if s.hp[dst] <= 0.0:
            self._on_death(src, dst)

    def _on_death(self, killer: int, dead: int):
        s, cfg, lay = self.s, self.cfg, self.lay
        s.hp[dead] = 0.0
        s.alive[dead] = False
        s.aggro[s.aggro == dead] = -1
        kind = UnitKind(int(s.kind[dead]))
        killer_hero = killer < lay.n_heroes and s.kind[killer] == UnitKind.HERO

        if kind == UnitKind.HERO:
            self._emit(dead, "death", 1.0)
            s.respawn_cd[dead] = cfg.respawn_ticks
            s.recall_left[dead] = -1
            s.haste_ticks[dead] = 0
            enemy = 1 - int(s.team[dead])
            killer_slot = killer if (killer_hero and s.team[killer] == enemy) else -1
            if killer_slot >= 0:
                s.team_kills[enemy] += 1
                self._emit(killer_slot, "kill", 1.0)
                s.gold[killer_slot] += cfg.kill_gold
                s.exp[killer_slot] += cfg.kill_exp
                self._maybe_level_up(killer_slot)
            for a in lay.hero_slots(enemy):
                if a != killer_slot and s.hit_timer[dead, a] > 0:
                    self._emit(a, "assist", 1.0)
            s.hit_timer[dead, :] = 0
            return

        if kind == UnitKind.MINION:
            if killer_hero:
                self._emit(killer, "last_hit", 1.0)
                s.gold[killer] += cfg.minion_gold
                s.exp[killer] += cfg.minion_exp
                self._maybe_level_up(killer)
            return

        if kind == UnitKind.MONSTER:
            m = dead - lay.monster0
            s.monster_respawn_cd[m] = cfg.monster_respawn
            if killer_hero:
                s.gold[killer] += cfg.monster_gold * (1.0 if m == 0 else 1.5)
                s.exp[killer] += cfg.monster_exp * (1.0 if m == 0 else 1.5)
                self._maybe_level_up(killer)
                team = int(s.team[killer])
                s.team_buff_mult[team] = TYRANT_BUFF_MULT if m == 0 else OVERLORD_BUFF_MULT
                s.team_buff_ticks[team] = BUFF_TICKS
                item = "tyrant_buff" if m == 0 else "overlord_buff"
                for h in lay.hero_slots(team):
                    if s.alive[h]:
                        self._emit(h, item, 1.0)
            return

        if kind == UnitKind.TURRET:
            enemy = 1 - int(s.team[dead])
            self._turrets_alive[int(s.team[dead])] -= 1
            for h in lay.hero_slots(enemy):
                s.gold[h] += TURRET_GOLD
            return

        if kind == UnitKind.BASE:
            loser = int(s.team[dead])
            s.winner = 1 - loser
            for h in lay.hero_slots(1 - loser):
                self._emit(h, "destroy_base", 1.0)
            for h in lay.hero_slots(loser):
                self._emit(h, "destroy_base", -1.0)
            return

    # ----------------------------------------------------------- visibility

    def _compute_visibility(self) -> np.ndarray:
        """bool [2, U]: what each team can currently see."""
        s, lay, arena = self.s, self.lay, self.arena
        U = lay.n_units
        vis = np.zeros((2, U), dtype=bool)
        bush = np.array([arena.bush_at(float(s.x[u]), float(s.y[u])) for u in range(U)],
                        dtype=np.int8)
        for team in (0, 1):
            own = (s.team[:U] == team) & s.alive[:U]
            vis[team, own] = True
            for h in lay.hero_slots(team):
                vis[team, h] = True    # own heroes stay known while dead
            # structures are common knowledge, destroyed or not
            for t in list(lay.turret_slots(0)) + list(lay.turret_slots(1)):
                vis[team, t] = True
            vis[team, lay.base_of(0)] = vis[team, lay.base_of(1)] = True
            sources = np.flatnonzero(own)
            if sources.size == 0:
                continue
            for u in range(U):
                if vis[team, u] or not s.alive[u] or s.team[u] == team:
                    continue
                for v in sources:
                    d = math.hypot(float(s.x[u] - s.x[v]), float(s.y[u] - s.y[v]))
                    if d <= self.cfg.vision_radius and (bush[u] == 0 or bush[u] == bush[v]):
                        vis[team, u] = True
                        break
        return vis

    def _hero_visibility(self) -> np.ndarray:
        """bool [n]: hero visible to the opposing team."""
        s, lay = self.s, self.lay
        out = np.zeros(lay.n_heroes, dtype=bool)
        for h in range(lay.n_heroes):
            out[h] = self._visible[1 - int(s.team[h]), h]
        return out

    # -------------------------------------------------------------- rewards

    def _emit(self, hero: int, item: str, value: float):
        self._events.append((int(hero), item, float(value)))

    def _reduce_rewards(self) -> np.ndarray:
        """Fold the event log into per-hero, per-head weighted sums, in event
        order, with float64 accumulation."""
        n = self.lay.n_heroes
        out = np.zeros((n, len(REWARD_HEADS)), dtype=np.float64)
        w = self.cfg.reward_weights
        for hero, item, value in self._events:
            head, _, _ = REWARD_ITEMS[item]
            out[hero, HEAD_INDEX[head]] += w[item] * value
        return out

    def _build_obs(self) -> list[Observation]:
        return [self._obs.build(self.s, self._visible, h, self._base_vulnerable())
                for h in range(self.lay.n_heroes)]
