"""Environment configuration and the key=value text config format."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

# Reward heads, in canonical order. Weighted sum of the per-head value
# predictions gives the total value estimate.
REWARD_HEADS = ("farming", "kda", "damage", "pushing", "win_lose")

# Per-item reward weights and the head each item feeds. "dense" items tick
# every step (deltas of a running stat), "sparse" items fire on events.
# value semantics per item:
#   gold/experience: raw amount gained this tick
#   mana/health_point: delta of (resource fraction)^4, so low reserves dominate
#   no_op: 1 per tick spent idle (weight is negative)
#   hurt_to_hero/attack_turret/attack_base: damage dealt / target max hp
#   destroy_base: +1 winning team, -1 losing team (zero sum)
#   expose_invisible_enemy: first sighting of a hidden enemy hero (per 100 ticks)
REWARD_ITEMS: dict[str, tuple[str, float, str]] = {
    # item: (head, weight, kind)
    "gold": ("farming", 0.005, "dense"),
    "experience": ("farming", 0.001, "dense"),
    "mana": ("farming", 0.05, "dense"),
    "no_op": ("farming", -0.00001, "dense"),
    "attack_monster": ("farming", 0.1, "sparse"),
    "kill": ("kda", 1.0, "sparse"),
    "death": ("kda", -1.0, "sparse"),
    "assist": ("kda", 1.0, "sparse"),
    "tyrant_buff": ("kda", 1.0, "sparse"),
    "overlord_buff": ("kda", 1.5, "sparse"),
    "expose_invisible_enemy": ("kda", 0.3, "sparse"),
    "last_hit": ("kda", 0.2, "sparse"),
    "health_point": ("damage", 3.0, "dense"),
    "hurt_to_hero": ("damage", 0.3, "sparse"),
    "attack_turret": ("pushing", 1.0, "sparse"),
    "attack_base": ("pushing", 1.0, "sparse"),
    "destroy_base": ("win_lose", 2.5, "sparse"),
}


def default_reward_weights() -> dict[str, float]:
    return {item: w for item, (_, w, _) in REWARD_ITEMS.items()}


def head_of_item(item: str) -> str:
    return REWARD_ITEMS[item][0]


@dataclass(frozen=True)
class EnvConfig:
    """Simulator parameters. Frozen so a config can key caches and hashes."""

    team_size: int = 2
    map_width: int = 64
    map_height: int = 24
    horizon: int = 6000              # ticks before a draw is declared
    vision_radius: float = 8.0
    n_move_bins: int = 16            # direction bins for move / skill aim
    spatial_window: int = 17         # side of the egocentric spatial grid
    spatial_cell: float = 1.0        # world cells per grid cell
    tick_seconds: float = 0.1

    # lane furniture
    turrets_per_side: int = 2
    turret_hp: float = 900.0
    turret_attack: float = 60.0
    turret_range: float = 6.0
    turret_cooldown: int = 4
    base_hp: float = 1400.0

    # minions
    wave_period: int = 60            # ticks between waves
    wave_size: int = 2
    max_minions_per_side: int = 4
    minion_hp: float = 120.0
    minion_attack: float = 14.0
    minion_speed: float = 0.30
    minion_range: float = 1.5
    minion_cooldown: int = 3
    minion_gold: float = 40.0
    minion_exp: float = 24.0

    # neutral monsters
    monster_hp: float = 500.0
    monster_attack: float = 40.0
    monster_respawn: int = 900       # ticks
    monster_gold: float = 80.0
    monster_exp: float = 60.0

    # hero economy / pacing
    respawn_ticks: int = 150
    passive_gold: float = 0.6        # per tick
    passive_exp: float = 0.4
    kill_gold: float = 120.0
    kill_exp: float = 80.0
    mana_regen: float = 0.5          # per tick
    hp_regen_frac: float = 0.0005    # fraction of max hp per tick
    recall_ticks: int = 30
    restore_ticks: int = 100         # cooldown of the in-place restore action
    restore_frac: float = 0.25       # hp+mana fraction restored
    level_exp: float = 140.0         # exp per level
    level_stat_gain: float = 0.06    # per-level multiplier on attack/max_hp

    damage_spread: float = 0.05      # U(1-s, 1+s) multiplier on all damage
    reward_weights: dict[str, float] = field(default_factory=default_reward_weights)

    def __post_init__(self):
        if self.team_size < 1:
            raise ValueError("team_size must be >= 1")
        if self.spatial_window % 2 != 1:
            raise ValueError("spatial_window must be odd")
        unknown = set(self.reward_weights) - set(REWARD_ITEMS)
        if unknown:
            raise ValueError(f"unknown reward items: {sorted(unknown)}")

    def with_reward_weights(self, **overrides: float) -> "EnvConfig":
        w = dict(self.reward_weights)
        w.update(overrides)
        return replace(self, reward_weights=w)

    def config_hash(self) -> str:
        blob = json.dumps(to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def desk_config(**overrides) -> EnvConfig:
    """Small fast variant for experiments that play thousands of matches:
    short lane, one turret per side, soft structures. Scripted mirror matches
    finish in 100-700 ticks; hero identity still swings win rates hard."""
    base = dict(map_width=24, map_height=12, horizon=900,
                turret_hp=400.0, base_hp=700.0, wave_period=40,
                turrets_per_side=1, vision_radius=7.0)
    base.update(overrides)
    return EnvConfig(**base)


def train_config(**overrides) -> EnvConfig:
    """Compact arena for reinforcement-learning runs: lanes short enough
    that randomly exploring heroes reach enemies within a few hundred ticks,
    so win/loss reward actually flows from the start. On the desk map a
    fresh policy never makes contact and learns nothing."""
    base = dict(map_width=16, map_height=10, horizon=500,
                turret_hp=300.0, base_hp=500.0, wave_period=40,
                turrets_per_side=1, vision_radius=7.0)
    base.update(overrides)
    return EnvConfig(**base)


def to_dict(cfg: EnvConfig) -> dict:
    d = {}
    for name in cfg.__dataclass_fields__:
        v = getattr(cfg, name)
        d[name] = dict(v) if isinstance(v, dict) else v
    return d


def save_config(cfg: EnvConfig, path: str | Path) -> None:
    """Write a config as `key = value` lines; reward weights as reward.<item>."""
    lines = ["# minimoba environment config"]
    for name in cfg.__dataclass_fields__:
        v = getattr(cfg, name)
        if name == "reward_weights":
            for item in REWARD_ITEMS:
                lines.append(f"reward.{item} = {v[item]!r}")
        else:
            lines.append(f"{name} = {v!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_config(path: str | Path) -> EnvConfig:
    base = EnvConfig()
    fields = {f: base.__dataclass_fields__[f].type for f in base.__dataclass_fields__}
    kwargs: dict = {}
    weights = dict(base.reward_weights)
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key.startswith("reward."):
            item = key[len("reward."):]
            if item not in REWARD_ITEMS:
                raise ValueError(f"{path}:{ln}: unknown reward item {item!r}")
            weights[item] = float(val)
        elif key in fields:
            cur = getattr(base, key)
            if isinstance(cur, bool):
                kwargs[key] = val.lower() in ("1", "true", "yes")
            elif isinstance(cur, int):
                kwargs[key] = int(val)
            elif isinstance(cur, float):
                kwargs[key] = float(val)
            else:
                kwargs[key] = val
        else:
            raise ValueError(f"{path}:{ln}: unknown config key {key!r}")
    kwargs["reward_weights"] = weights
    return EnvConfig(**kwargs)
