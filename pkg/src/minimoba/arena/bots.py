"""Reference opponents: a do-nothing anchor, a random-legal bot, a scripted
lane pusher, and a wrapper that drives a team from a trained network."""

from __future__ import annotations

import math

import numpy as np

from ..net.layers import masked_softmax
from ..net.model import PolicyValueNet
from ..sim.actions import Action, ActionKind, bin_centers, head_relevance
from ..sim.engine import MobaEnv
from ..util import philox
from ..heroes import SkillEffect


def dir_to_bins(team: int, dx: float, dy: float, n_bins: int) -> tuple[int, int]:
    """World-space direction -> (how_x, how_y) bins in the hero's own frame."""
    if team == 1:
        dx = -dx
    norm = math.hypot(dx, dy)
    if norm > 1e-9:
        dx, dy = dx / norm, dy / norm
    centers = bin_centers(n_bins)
    return int(np.argmin(np.abs(centers - dx))), int(np.argmin(np.abs(centers - dy)))


class Player:
    name = "player"
    wants_obs = False    # True -> play_match builds full observation tensors

    def begin_episode(self, env: MobaEnv, team: int) -> None:
        pass

    def act(self, env: MobaEnv, obs, team: int) -> list[Action]:
        raise NotImplementedError


class NeverActBot(Player):
    """Submits NONE every tick. Serves as the Elo anchor."""

    name = "never_act"

    def act(self, env, obs, team):
        return [Action.noop() for _ in env.lay.hero_slots(team)]


class RandomBot(Player):
    """Uniform over legal whats, targets, and direction bins."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._rng = philox(self.seed, 0)
        self._episode = 0

    def begin_episode(self, env, team):
        self._episode += 1
        self._rng = philox(self.seed, self._episode, team)

    def act(self, env, obs, team):
        rng = self._rng
        acts = []
        for i in env.lay.hero_slots(team):
            mask_what, mask_who = env.masks(i)
            legal = np.flatnonzero(mask_what)
            what = int(legal[rng.integers(len(legal))])
            who = 0
            needs_who, _ = head_relevance(what, env.heroes[i])
            if needs_who:
                tgts = np.flatnonzero(mask_who)
                who = int(tgts[rng.integers(len(tgts))])
            acts.append(Action(what, who,
                               int(rng.integers(env.cfg.n_move_bins)),
                               int(rng.integers(env.cfg.n_move_bins))))
        return acts


class ScriptedBot(Player):
    """Deterministic lane pusher: retreats when low, bursts and focuses the
    weakest reachable enemy hero, otherwise attacks what it can and walks the
    lane toward the enemy base."""

    name = "scripted"
    RETREAT_HP = 0.30
    RESUME_HP = 0.75

    def __init__(self):
        self._retreating: dict[int, bool] = {}

    def begin_episode(self, env, team):
        self._retreating = {}

    def act(self, env, obs, team):
        s = env.s
        acts = []
        for i in env.lay.hero_slots(team):
            if not s.alive[i]:
                acts.append(Action.noop())
                continue
            mask_what, mask_who = env.masks(i)
            hp = float(s.hp[i] / s.max_hp[i])
            retreating = self._retreating.get(i, False)
            if hp < self.RETREAT_HP:
                retreating = True
            if hp > self.RESUME_HP:
                retreating = False
            self._retreating[i] = retreating

            if retreating:
                if mask_what[ActionKind.RESTORE]:
                    acts.append(Action(int(ActionKind.RESTORE)))
                    continue
                if s.recall_left[i] >= 0:
                    acts.append(Action.noop())     # keep channeling
                    continue
                threat = self._nearest_enemy_hero_dist(env, i, team)
                if mask_what[ActionKind.RECALL] and threat > 7.0:
                    acts.append(Action(int(ActionKind.RECALL)))
                    continue
                bx, by = env.arena.base_pos[team]
                hx, hy = dir_to_bins(team, bx - float(s.x[i]), by - float(s.y[i]),
                                     env.cfg.n_move_bins)
                acts.append(Action(int(ActionKind.MOVE), how_x=hx, how_y=hy))
                continue

            target = self._pick_target(env, i, mask_who)
            if target is not None:
                slot, is_hero = target
                burst = self._burst_slot(env, i)
                if is_hero and burst is not None and mask_what[burst]:
                    acts.append(Action(int(burst), who=slot))
                    continue
                if mask_what[ActionKind.ATTACK]:
                    acts.append(Action(int(ActionKind.ATTACK), who=slot))
                    continue
            ex, _ = env.arena.base_pos[1 - team]
            hx, hy = dir_to_bins(team, ex - float(s.x[i]),
                                 env.arena.lane_y - float(s.y[i]),
                                 env.cfg.n_move_bins)
            acts.append(Action(int(ActionKind.MOVE), how_x=hx, how_y=hy))
        return acts

    def _nearest_enemy_hero_dist(self, env, i, team) -> float:
        s = env.s
        best = 1e9
        for j in env.lay.hero_slots(1 - team):
            if s.alive[j]:
                best = min(best, math.hypot(float(s.x[j] - s.x[i]),
                                            float(s.y[j] - s.y[i])))
        return best

    def _pick_target(self, env, i, mask_who):
        """Prefer the weakest enemy hero, then base, turret, minion, monster."""
        s = env.s
        best = None
        best_key = None
        from ..sim.state import UnitKind
        prio = {UnitKind.HERO: 0, UnitKind.BASE: 1, UnitKind.TURRET: 2,
                UnitKind.MINION: 3, UnitKind.MONSTER: 4}
        for slot in np.flatnonzero(mask_who):
            u = env.stack_unit(i, int(slot))
            kind = UnitKind(int(s.kind[u]))
            key = (prio[kind], float(s.hp[u] / s.max_hp[u]))
            if best_key is None or key < best_key:
                best_key = key
                best = (int(slot), kind == UnitKind.HERO)
        return best

    def _burst_slot(self, env, i) -> int | None:
        for k, sk in enumerate(env.heroes[i].skills):
            if sk.effect == SkillEffect.BURST:
                return int(ActionKind.SKILL_1) + k
        return None


class PolicyPlayer(Player):
    """Drives one team from a PolicyValueNet, sampling from masked heads.
    Keeps per-hero LSTM state across the episode."""

    wants_obs = True

    def __init__(self, net: PolicyValueNet, name: str = "policy", seed: int = 0,
                 greedy: bool = False):
        self.net = net
        self.name = name
        self.seed = int(seed)
        self.greedy = greedy
        self._h = {}
        self._c = {}
        self._episode = 0
        self._tick = 0

    def begin_episode(self, env, team):
        self._episode += 1
        self._tick = 0
        for i in env.lay.hero_slots(team):
            self._h[i], self._c[i] = self.net.zero_state(1)

    def act(self, env, obs, team):
        self._tick += 1
        slots = list(env.lay.hero_slots(team))
        batch = {
            "scalar": np.stack([obs[i].scalar for i in slots]),
            "units": np.stack([obs[i].units for i in slots]),
            "spatial": np.stack([obs[i].spatial for i in slots]),
            "hidden": np.stack([obs[i].hidden for i in slots]),
        }
        h = np.concatenate([self._h[i] for i in slots])
        c = np.concatenate([self._c[i] for i in slots])
        outs = self.net.step(batch, h, c)
        acts = []
        for row, i in enumerate(slots):
            ob = obs[i]
            rng = philox(self.seed, self._episode, self._tick, i)
            u = rng.random(4)
            what = self._draw(outs["what"][row], ob.mask_what, u[0])
            needs_who, _ = head_relevance(what, env.heroes[i])
            who = self._draw(outs["who"][row], ob.mask_who, u[1]) if needs_who else 0
            nb = env.cfg.n_move_bins
            hx = self._draw(outs["how_x"][row], np.ones(nb, dtype=bool), u[2])
            hy = self._draw(outs["how_y"][row], np.ones(nb, dtype=bool), u[3])
            acts.append(Action(what, who, hx, hy))
            self._h[i] = outs["h"][row:row + 1].copy()
            self._c[i] = outs["c"][row:row + 1].copy()
        return acts

    def _draw(self, logits, mask, u: float) -> int:
        p = masked_softmax(logits, mask)
        if self.greedy:
            return int(np.argmax(p))
        cdf = np.cumsum(p)
        idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
        idx = min(idx, len(p) - 1)
        if not mask[idx]:
            legal = np.flatnonzero(mask)
            if legal.size == 0:
                return 0
            idx = int(legal[np.argmax(p[legal])])
        return idx
