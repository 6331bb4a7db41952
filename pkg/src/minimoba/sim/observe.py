"""Per-hero observations: unit stack, scalar block, spatial window, masks.

Frames are team-mirrored: team B heroes observe an x-flipped world, so one
policy can play both sides and "push right" always means "push toward the
enemy base". Enemy heroes hidden by fog are zeroed out of the policy-visible
blocks; their true state rides along in `hidden`, which only the value path
of a network is allowed to consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import EnvConfig
from ..heroes import HeroSpec, SkillEffect
from .actions import ActionKind, N_WHAT, never_legal_mask
from .arena_map import ArenaMap
from .state import GameState, Layout, UnitKind, make_layout

F_UNIT = 26
N_STATS = 13
DANGER_RADIUS = 1.5


@dataclass
class Observation:
    hero: int                 # acting hero slot
    tick: int
    scalar: np.ndarray        # f32 [scalar_dim] = units.ravel() + match stats
    units: np.ndarray         # f32 [K, F_UNIT], attention keys for the who head
    spatial: np.ndarray       # f32 [6, S, S]
    hidden: np.ndarray        # f32 [hidden_dim], value-path-only features
    mask_what: np.ndarray     # bool [N_WHAT]
    mask_who: np.ndarray      # bool [K]
    stack_units: np.ndarray   # int16 [K], global unit index per stack slot


def obs_sizes(cfg: EnvConfig) -> dict:
    lay = make_layout(cfg)
    k = lay.n_heroes + 2 + 2 * lay.n_turrets + 2 + 2 * lay.n_minions
    return {
        "n_stack": k,
        "f_unit": F_UNIT,
        "scalar_dim": k * F_UNIT + N_STATS,
        "hidden_dim": 4 * cfg.team_size + 4,
        "spatial_shape": (6, cfg.spatial_window, cfg.spatial_window),
        "n_what": N_WHAT,
        "n_bins": cfg.n_move_bins,
    }


class ObsBuilder:
    def __init__(self, cfg: EnvConfig, arena: ArenaMap, lay: Layout,
                 heroes: list[HeroSpec]):
        self.cfg = cfg
        self.arena = arena
        self.lay = lay
        self.heroes = heroes
        self.k = lay.n_heroes + 2 + 2 * lay.n_turrets + 2 + 2 * lay.n_minions
        self._stack = np.stack([self._stack_for(h) for h in range(lay.n_heroes)])
        self._base_legal = never_legal_mask()
        # static map channels, padded by half a window so extraction never wraps
        pad = cfg.spatial_window // 2
        obst = np.pad(arena.obstacles.astype(np.float32), pad, constant_values=1.0)
        bush = np.pad((arena.bush_id > 0).astype(np.float32), pad, constant_values=0.0)
        self._pad = pad
        self._obst_pad = obst
        self._bush_pad = bush

    def _stack_for(self, h: int) -> np.ndarray:
        """Fixed slot order: self, allies, enemy heroes, own base, enemy base,
        own turrets, enemy turrets, monsters, own minions, enemy minions."""
        lay = self.lay
        team = 0 if h < lay.n_heroes // 2 else 1
        order = [h]
        order += [a for a in lay.hero_slots(team) if a != h]
        order += list(lay.hero_slots(1 - team))
        order += [lay.base_of(team), lay.base_of(1 - team)]
        order += list(lay.turret_slots(team)) + list(lay.turret_slots(1 - team))
        order += [lay.monster0, lay.monster0 + 1]
        order += list(lay.minion_slots(team)) + list(lay.minion_slots(1 - team))
        return np.asarray(order, dtype=np.int16)

    def stack_unit(self, s: GameState, h: int, slot: int) -> int:
        if not (0 <= slot < self.k):
            return -1
        return int(self._stack[h, slot])

    # ------------------------------------------------------------------ build

    def build(self, s: GameState, visible: np.ndarray, h: int,
              base_vuln: np.ndarray) -> Observation:
        cfg, lay, arena = self.cfg, self.lay, self.arena
        team = int(s.team[h])
        mirror = -1.0 if team == 1 else 1.0
        w, ht = arena.width, arena.height
        diag = float(np.hypot(w, ht))

        units = np.zeros((self.k, F_UNIT), dtype=np.float32)
        for slot, u in enumerate(self._stack[h]):
            u = int(u)
            if not visible[team, u]:
                continue
            if not s.alive[u] and s.kind[u] not in (UnitKind.TURRET, UnitKind.BASE,
                                                    UnitKind.HERO):
                continue
            row = units[slot]
            row[int(s.kind[u])] = 1.0
            rel = 0 if s.team[u] == team else (1 if s.team[u] == 1 - team else 2)
            row[5 + rel] = 1.0
            row[8] = s.hp[u] / s.max_hp[u]
            row[9] = 1.0 if s.alive[u] else 0.0
            dx = float(s.x[u] - s.x[h]) * mirror
            dy = float(s.y[u] - s.y[h])
            row[10] = 0.5 + dx / (2.0 * w)
            row[11] = 0.5 + dy / (2.0 * ht)
            row[12] = float(np.hypot(dx, dy)) / diag
            row[13] = s.attack[u] / 200.0
            row[14] = s.defense[u] / 100.0
            row[15] = s.speed[u] / 1.0
            row[16] = s.atk_range[u] / 10.0
            if u < lay.n_heroes:
                row[17] = s.mana[u] / s.max_mana[u]
                row[18] = s.level[u] / 15.0
                row[19] = s.gold[u] / 2000.0
                row[22] = s.respawn_cd[u] / max(1, cfg.respawn_ticks)
                row[23] = 1.0 if s.haste_ticks[u] > 0 else 0.0
                row[24] = 1.0 if s.recall_left[u] >= 0 else 0.0
            row[20] = 1.0   # populated row => visible to the observer
            row[21] = s.atk_cd[u] / max(1, int(s.atk_cd_max[u]))
            row[25] = 1.0 if u == h else 0.0
        np.clip(units, 0.0, 1.0, out=units)

        stats = self._match_stats(s, team)
        scalar = np.concatenate([units.reshape(-1), stats]).astype(np.float32)
        spatial = self._spatial(s, h, team)
        hidden = self._hidden(s, team, visible)
        mask_what, mask_who = self.action_masks(s, visible, h, base_vuln)
        return Observation(hero=h, tick=s.tick, scalar=scalar, units=units,
                           spatial=spatial, hidden=hidden,
                           mask_what=mask_what, mask_who=mask_who,
                           stack_units=self._stack[h].copy())

    def _match_stats(self, s: GameState, team: int) -> np.ndarray:
        cfg, lay = self.cfg, self.lay
        own, foe = lay.hero_slots(team), lay.hero_slots(1 - team)
        own_l, foe_l = list(own), list(foe)
        nh = len(own_l)
        stats = np.zeros(N_STATS, dtype=np.float32)
        stats[0] = s.tick / max(1, cfg.horizon)
        stats[1] = 0.5 + (float(s.team_kills[team]) - float(s.team_kills[1 - team])) / 20.0
        stats[2] = 0.5 + (float(s.gold[own_l].sum()) - float(s.gold[foe_l].sum())) / 4000.0
        stats[3] = 0.5 + (float(s.exp[own_l].sum()) - float(s.exp[foe_l].sum())) / 4000.0
        stats[4] = float(sum(s.alive[t] for t in lay.turret_slots(team))) / max(1, lay.n_turrets)
        stats[5] = float(sum(s.alive[t] for t in lay.turret_slots(1 - team))) / max(1, lay.n_turrets)
        stats[6] = s.hp[lay.base_of(team)] / s.max_hp[lay.base_of(team)]
        stats[7] = s.hp[lay.base_of(1 - team)] / s.max_hp[lay.base_of(1 - team)]
        stats[8] = (s.tick % cfg.wave_period) / max(1, cfg.wave_period)
        stats[9] = float(s.level[own_l].sum()) / (15.0 * nh)
        stats[10] = float(s.level[foe_l].sum()) / (15.0 * nh)
        stats[11] = float(s.alive[own_l].sum()) / nh
        stats[12] = float(s.alive[foe_l].sum()) / nh
        return np.clip(stats, 0.0, 1.0, out=stats)

    def _spatial(self, s: GameState, h: int, team: int) -> np.ndarray:
        cfg = self.cfg
        S = cfg.spatial_window
        half = S // 2
        pad = self._pad
        cx, cy = int(s.x[h]), int(s.y[h])
        out = np.zeros((6, S, S), dtype=np.float32)
        # dynamic: projectile cells and their danger halos, observer-relative teams
        for p in np.flatnonzero(s.proj_alive):
            ally = int(s.proj_team[p]) == team
            px, py = float(s.proj_x[p]), float(s.proj_y[p])
            gx, gy = int(px) - cx + half, int(py) - cy + half
            if 0 <= gx < S and 0 <= gy < S:
                out[2 if ally else 3, gy, gx] = 1.0
            r = int(np.ceil(DANGER_RADIUS))
            for oy in range(-r, r + 1):
                for ox in range(-r, r + 1):
                    if ox * ox + oy * oy > DANGER_RADIUS * DANGER_RADIUS:
                        continue
                    wx, wy = int(px) + ox - cx + half, int(py) + oy - cy + half
                    if 0 <= wx < S and 0 <= wy < S:
                        out[0 if ally else 1, wy, wx] = 1.0
        # static: obstacles and bushes from the padded maps
        y0, x0 = cy - half + pad, cx - half + pad
        out[4] = self._obst_pad[y0:y0 + S, x0:x0 + S]
        out[5] = self._bush_pad[y0:y0 + S, x0:x0 + S]
        if team == 1:
            out = out[:, :, ::-1].copy()
        return out

    def _hidden(self, s: GameState, team: int, visible: np.ndarray) -> np.ndarray:
        """True enemy-hero and monster state, fog ignored. Value-path-only."""
        lay, arena = self.lay, self.arena
        vals = []
        for j in lay.hero_slots(1 - team):
            xm = (arena.width - float(s.x[j])) if team == 1 else float(s.x[j])
            vals += [xm / arena.width,
                     float(s.y[j]) / arena.height,
                     float(s.hp[j] / s.max_hp[j]),
                     1.0 if visible[team, j] else 0.0]
        for m in (0, 1):
            u = lay.monster0 + m
            vals += [float(s.hp[u] / s.max_hp[u]), 1.0 if s.alive[u] else 0.0]
        return np.asarray(vals, dtype=np.float32)

    # ------------------------------------------------------------------ masks

    def action_masks(self, s: GameState, visible: np.ndarray, h: int,
                     base_vuln: np.ndarray):
        cfg, lay = self.cfg, self.lay
        team = int(s.team[h])
        spec = self.heroes[h]
        mask_who = np.zeros(self.k, dtype=bool)
        mask_what = np.zeros(N_WHAT, dtype=bool)
        mask_what[ActionKind.NONE] = True
        if not s.alive[h]:
            return mask_what, mask_who

        reach = spec.targeting_range
        for slot, u in enumerate(self._stack[h]):
            u = int(u)
            if u == h or not s.alive[u]:
                continue
            if s.team[u] == team:
                continue
            if not visible[team, u]:
                continue
            if s.kind[u] == UnitKind.BASE and not base_vuln[s.team[u]]:
                continue
            dx, dy = float(s.x[u] - s.x[h]), float(s.y[u] - s.y[h])
            if np.hypot(dx, dy) <= reach:
                mask_who[slot] = True
        any_target = bool(mask_who.any())

        mask_what[ActionKind.MOVE] = True
        mask_what[ActionKind.ATTACK] = any_target
        for i, sk in enumerate(spec.skills):
            ok = s.skill_cd[h, i] == 0 and s.mana[h] >= sk.mana_cost
            if sk.effect == SkillEffect.BURST:
                ok = ok and any_target
            mask_what[ActionKind.SKILL_1 + i] = ok
        bx, by = self.arena.base_pos[team]
        far_from_home = np.hypot(float(s.x[h]) - bx, float(s.y[h]) - by) > 4.0
        mask_what[ActionKind.RECALL] = s.recall_left[h] < 0 and far_from_home
        mask_what[ActionKind.RESTORE] = s.restore_cd[h] == 0
        mask_what &= self._base_legal
        mask_what[ActionKind.NONE] = True
        return mask_what, mask_who
