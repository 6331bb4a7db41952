"""Static map geometry: lane, obstacles, bushes, spawn points, camps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import EnvConfig


@dataclass(frozen=True)
class ArenaMap:
    width: int
    height: int
    lane_y: float
    base_pos: tuple[tuple[float, float], tuple[float, float]]       # team 0, team 1
    turret_pos: tuple[tuple[float, float], ...]                     # team 0 front..back, then team 1
    camp_pos: tuple[tuple[float, float], tuple[float, float]]       # tyrant, overlord
    obstacles: np.ndarray                                           # bool [H, W]
    bush_id: np.ndarray                                             # int8 [H, W], 0 = open ground

    def blocked(self, x: float, y: float) -> bool:
        cx, cy = int(x), int(y)
        if not (0 <= cx < self.width and 0 <= cy < self.height):
            return True
        return bool(self.obstacles[cy, cx])

    def bush_at(self, x: float, y: float) -> int:
        cx, cy = int(x), int(y)
        if not (0 <= cx < self.width and 0 <= cy < self.height):
            return 0
        return int(self.bush_id[cy, cx])


def build_map(cfg: EnvConfig) -> ArenaMap:
    w, h = cfg.map_width, cfg.map_height
    lane_y = h / 2.0

    obstacles = np.zeros((h, w), dtype=bool)
    bush_id = np.zeros((h, w), dtype=np.int8)

    # Two short walls flanking mid, forcing detours toward the jungle camps.
    wx0, wx1 = int(w * 0.47), int(w * 0.53)
    for yy in (int(lane_y) - 5, int(lane_y) - 4):
        obstacles[yy, wx0:wx1 + 1] = True
    for yy in (int(lane_y) + 3, int(lane_y) + 4):
        obstacles[yy, wx0:wx1 + 1] = True

    # Bush patches beside the lane, two per side, mirrored. Patch ids start at 1.
    def paint_bush(pid: int, x0: int, x1: int, y0: int, y1: int):
        bush_id[y0:y1 + 1, x0:x1 + 1] = pid

    by_hi = int(lane_y) - 3
    by_lo = int(lane_y) + 2
    bx = int(w * 0.30)
    paint_bush(1, bx, bx + 5, by_hi, by_hi + 1)
    paint_bush(2, bx, bx + 5, by_lo, by_lo + 1)
    mbx = w - 1 - (bx + 5)
    paint_bush(3, mbx, mbx + 5, by_hi, by_hi + 1)
    paint_bush(4, mbx, mbx + 5, by_lo, by_lo + 1)

    base_a = (2.5, lane_y)
    base_b = (w - 2.5, lane_y)
    # Front turret ~1/3 in, the rest fall back toward the base approach.
    fracs = np.linspace(0.33, 0.15, cfg.turrets_per_side)
    xs = [int(w * f) + 0.5 for f in fracs]
    turrets = tuple((x, lane_y) for x in xs) + tuple((w - x, lane_y) for x in xs)
    camps = ((w / 2.0, lane_y - 7.5), (w / 2.0, lane_y + 6.5))
    return ArenaMap(
        width=w, height=h, lane_y=lane_y,
        base_pos=(base_a, base_b),
        turret_pos=turrets,
        camp_pos=camps,
        obstacles=obstacles,
        bush_id=bush_id,
    )
