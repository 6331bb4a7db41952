"""Generalized advantage estimation, one reward head at a time."""

from __future__ import annotations

import numpy as np


def gae(rewards: np.ndarray, values: np.ndarray, bootstrap: np.ndarray,
        dones: np.ndarray, gamma: float, lam: float):
    """Per-head GAE over a [T, ...heads] reward/value sequence.

    rewards, values: [T, ..., H]; bootstrap: [..., H] value estimate for the
    state after step T-1 (ignored where dones[T-1]); dones: [T] or [T, ...]
    episode-end flags. Returns (advantages, returns) in float64 with
    returns = advantages + values.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    bootstrap = np.asarray(bootstrap, dtype=np.float64)
    live_all = 1.0 - np.asarray(dones, dtype=np.float64)
    if live_all.ndim < rewards.ndim:
        live_all = live_all.reshape(live_all.shape + (1,) * (rewards.ndim - live_all.ndim))
    T = rewards.shape[0]
    adv = np.zeros_like(rewards)
    next_v = bootstrap.copy()
    acc = np.zeros(rewards.shape[1:], dtype=np.float64)
    for t in range(T - 1, -1, -1):
        live = live_all[t]
        delta = rewards[t] + gamma * next_v * live - values[t]
        acc = delta + gamma * lam * live * acc
        adv[t] = acc
        next_v = values[t]
    return adv, adv + values
