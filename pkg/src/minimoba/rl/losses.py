"""Policy-gradient objectives and their analytic derivatives.

Everything here is computed in float64 regardless of parameter dtype; the
resulting head gradients are handed to the network backward pass.
"""

from __future__ import annotations

import numpy as np


def dual_clip_objective(ratio: np.ndarray, adv: np.ndarray, clip_eps: float,
                        dual_clip: float):
    """Per-sample clipped surrogate with a lower bound on punishment.

    For adv >= 0:  min(r*A, clip(r, 1-eps, 1+eps)*A)
    For adv <  0:  max(min(r*A, clip(r)*A), c*A)   with c = dual_clip > 1

    The extra max() stops a single stale sample with a huge ratio and negative
    advantage from dominating the gradient. Returns (objective, d_obj/d_ratio),
    both elementwise. At ties the unclipped branch wins, matching the
    subgradient that keeps learning moving.
    """
    if dual_clip <= 1.0:
        raise ValueError("dual_clip must exceed 1")
    r = np.asarray(ratio, dtype=np.float64)
    a = np.asarray(adv, dtype=np.float64)
    unclipped = r * a
    clipped = np.clip(r, 1.0 - clip_eps, 1.0 + clip_eps) * a
    inner = np.minimum(unclipped, clipped)
    d_inner = np.where(unclipped <= clipped, a, 0.0)
    floor = dual_clip * a
    obj = np.where(a < 0.0, np.maximum(inner, floor), inner)
    d_obj = np.where(a < 0.0, np.where(inner >= floor, d_inner, 0.0), d_inner)
    return obj, d_obj


def masked_log_softmax(logits: np.ndarray, mask: np.ndarray):
    """(log_probs, probs) over legal entries; illegal entries get prob 0 and
    a large negative (finite) log so downstream picks can't produce nan."""
    z = np.asarray(logits, dtype=np.float64)
    m = np.asarray(mask, dtype=bool)
    neg = np.where(m, z, -np.inf)
    mx = np.max(neg, axis=-1, keepdims=True)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    e = np.where(m, np.exp(neg - mx), 0.0)
    tot = e.sum(axis=-1, keepdims=True)
    tot = np.where(tot == 0.0, 1.0, tot)
    p = e / tot
    logp = np.where(m, (neg - mx) - np.log(tot), -1e30)
    return logp, p


def entropy_masked(logits: np.ndarray, mask: np.ndarray):
    """Entropy of the masked distribution and d_entropy/d_logits."""
    logp, p = masked_log_softmax(logits, mask)
    plogp = np.where(p > 0.0, p * logp, 0.0)
    h = -plogp.sum(axis=-1)
    # dH/dz_j = -p_j * (log p_j + H); zero at illegal entries
    dh = np.where(p > 0.0, -p * (logp + h[..., None]), 0.0)
    return h, dh


def picked_log_prob(logits: np.ndarray, mask: np.ndarray, index: np.ndarray):
    """log p of chosen indices plus the backprop helper (probs, logp)."""
    logp, p = masked_log_softmax(logits, mask)
    idx = np.asarray(index, dtype=np.int64)
    picked = np.take_along_axis(logp, idx[..., None], axis=-1)[..., 0]
    return picked, p


def d_logits_from_dlogp(dlogp: np.ndarray, probs: np.ndarray, index: np.ndarray,
                        mask: np.ndarray):
    """Chain rule through log softmax for the picked entry:
    d logp(a)/d z_j = 1[j == a] - p_j over legal entries."""
    idx = np.asarray(index, dtype=np.int64)
    onehot = np.zeros_like(probs)
    np.put_along_axis(onehot, idx[..., None], 1.0, axis=-1)
    grad = dlogp[..., None] * (onehot - probs)
    return np.where(np.asarray(mask, dtype=bool), grad, 0.0)


def total_value(head_values: np.ndarray, weights) -> np.ndarray:
    """Weighted recombination of the per-head value estimates.

    head_values: [..., H]; weights: [H]. Returns the [...] scalar baseline
    the policy loss uses.
    """
    v = np.asarray(head_values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if v.shape[-1] != w.shape[0]:
        raise ValueError(f"head count mismatch: {v.shape[-1]} vs {w.shape[0]}")
    return np.einsum("...h,h->...", v, w)


def multi_head_value_loss(values: np.ndarray, returns: np.ndarray):
    """Mean over samples of the summed per-head squared error.

    values, returns: [..., H]. Returns (loss, d_loss/d_values).
    """
    v = np.asarray(values, dtype=np.float64)
    r = np.asarray(returns, dtype=np.float64)
    n = int(np.prod(v.shape[:-1])) or 1
    diff = v - r
    loss = float(np.sum(diff * diff) / n)
    return loss, 2.0 * diff / n
