"""Single-machine PPO learner over trajectory batches."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..net.model import PolicyValueNet
from .adam import Adam
from .gae import gae
from .losses import (d_logits_from_dlogp, dual_clip_objective, entropy_masked,
                     multi_head_value_loss, picked_log_prob, total_value)
from .trajectory import TrajectoryBatch


@dataclass
class LearnerConfig:
    lr: float = 1e-4
    gamma: float = 0.998
    lam: float = 0.95
    clip_eps: float = 0.2
    dual_clip: float = 3.0
    vf_coef: float = 1.0
    ent_coef: float = 0.01
    max_grad_norm: float = 10.0
    head_weights: tuple = (0.2, 0.2, 0.2, 0.2, 0.2)
    normalize_adv: bool = True
    staleness_bound: int = 4     # max allowed policy-version lag for a sample


class Learner:
    def __init__(self, net: PolicyValueNet, cfg: LearnerConfig | None = None):
        self.net = net
        self.cfg = cfg or LearnerConfig()
        self.opt = Adam(net.params, lr=self.cfg.lr,
                        max_grad_norm=self.cfg.max_grad_norm)
        self.version = 0

    def is_fresh(self, policy_version: int) -> bool:
        return self.version - int(policy_version) <= self.cfg.staleness_bound

    def update(self, batch: TrajectoryBatch) -> dict:
        """One gradient step on a batch of unrolls. Returns scalar stats."""
        cfg = self.cfg
        stale = ~np.array([self.is_fresh(v) for v in batch.versions])
        if stale.any():
            raise ValueError(
                f"{int(stale.sum())} trajectories exceed the staleness bound "
                f"{cfg.staleness_bound} at learner version {self.version}")
        T, B = batch.T, batch.B
        arr = batch.arrays

        adv_h, returns = gae(arr["rewards"], arr["values"], batch.bootstrap,
                             arr["done"], cfg.gamma, cfg.lam)
        w = np.asarray(cfg.head_weights, dtype=np.float64)
        adv = total_value(adv_h, w)
        if cfg.normalize_adv:
            std = adv.std()
            adv = (adv - adv.mean()) / (std if std > 1e-8 else 1.0)

        outs, cache = self.net.forward_seq(batch.seq_inputs(), batch.h0, batch.c0)

        lp_what, p_what = picked_log_prob(outs["what"], arr["mask_what"], arr["what"])
        lp_who, p_who = picked_log_prob(outs["who"], arr["mask_who"], arr["who"])
        bins_mask = np.ones(outs["how_x"].shape, dtype=bool)
        lp_hx, p_hx = picked_log_prob(outs["how_x"], bins_mask, arr["how_x"])
        lp_hy, p_hy = picked_log_prob(outs["how_y"], bins_mask, arr["how_y"])
        rel_who = arr["rel_who"].astype(np.float64)
        rel_how = arr["rel_how"].astype(np.float64)
        logp = lp_what + rel_who * lp_who + rel_how * (lp_hx + lp_hy)

        ratio = np.exp(logp - arr["behavior_logp"])
        obj, d_obj = dual_clip_objective(ratio, adv, cfg.clip_eps, cfg.dual_clip)
        n = T * B
        policy_loss = -float(obj.mean())
        # d(policy_loss)/d(logp) = -(1/n) * d_obj * d(ratio)/d(logp), ratio' = ratio
        dlogp = -(d_obj * ratio) / n

        ent_what, dent_what = entropy_masked(outs["what"], arr["mask_what"])
        ent_who, dent_who = entropy_masked(outs["who"], arr["mask_who"])
        ent_hx, dent_hx = entropy_masked(outs["how_x"], bins_mask)
        ent_hy, dent_hy = entropy_masked(outs["how_y"], bins_mask)
        entropy = float((ent_what + rel_who * ent_who
                         + rel_how * (ent_hx + ent_hy)).mean())

        value_loss, d_values = multi_head_value_loss(outs["values"], returns)

        ec = cfg.ent_coef / n
        d_what = d_logits_from_dlogp(dlogp, p_what, arr["what"], arr["mask_what"]) \
            - ec * dent_what
        d_who = d_logits_from_dlogp(dlogp * rel_who, p_who, arr["who"], arr["mask_who"]) \
            - ec * rel_who[..., None] * dent_who
        d_hx = d_logits_from_dlogp(dlogp * rel_how, p_hx, arr["how_x"], bins_mask) \
            - ec * rel_how[..., None] * dent_hx
        d_hy = d_logits_from_dlogp(dlogp * rel_how, p_hy, arr["how_y"], bins_mask) \
            - ec * rel_how[..., None] * dent_hy

        douts = {
            "d_what": d_what.astype(np.float32),
            "d_who": d_who.astype(np.float32),
            "d_how_x": d_hx.astype(np.float32),
            "d_how_y": d_hy.astype(np.float32),
            "d_values": (cfg.vf_coef * d_values).astype(np.float32),
        }
        grads = self.net.backward_seq(cache, douts)
        opt_stats = self.opt.step(self.net.params, grads)
        self.version += 1

        clip_frac = float(np.mean(np.abs(ratio - 1.0) > cfg.clip_eps))
        total = policy_loss + cfg.vf_coef * value_loss - cfg.ent_coef * entropy
        return {
            "version": self.version,
            "loss": total,
            "policy_loss": policy_loss,
            "value_loss": value_loss,
            "entropy": entropy,
            "ratio_mean": float(ratio.mean()),
            "ratio_max": float(ratio.max()),
            "clip_frac": clip_frac,
            "adv_mean": float(adv.mean()),
            "adv_std": float(adv.std()),
            "return_win_mean": float(returns[..., 4].mean()),
            "grad_norm": opt_stats["grad_norm"],
            "batch": B,
        }
