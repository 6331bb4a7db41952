"""Distillation objective: per-head cross entropy to the teacher's action
distributions plus squared error to its value heads, summed over samples.

The gradient w.r.t. the student's logits is the classic softmax-CE form,
student probability minus teacher probability, restricted to legal entries.
It vanishes exactly when the student matches the teacher everywhere.
"""

from __future__ import annotations

import numpy as np

from ..net.layers import masked_softmax

_EPS = 1e-12


def _check_proper(p: np.ndarray, mask: np.ndarray, head: str):
    """Rows with no legal entry carry the masked-softmax placeholder and are
    exempt; they contribute neither loss nor gradient."""
    p = np.asarray(p, dtype=np.float64)
    live = np.asarray(mask).any(axis=-1)
    if not live.any():
        return
    p, mask = p[live], np.asarray(mask)[live]
    if np.any(p < -1e-9):
        raise ValueError(f"improper teacher distribution on {head}: negative mass")
    if np.any(np.where(mask, 0.0, p) > 1e-9):
        raise ValueError(f"improper teacher distribution on {head}: mass on illegal entries")
    tot = p.sum(axis=-1)
    if np.any(np.abs(tot - 1.0) > 1e-6):
        raise ValueError(f"improper teacher distribution on {head}: sums in "
                         f"[{tot.min():.6f}, {tot.max():.6f}], expected 1")


def _ce_head(student_logits, teacher_p, mask):
    """Cross entropy -sum p_t log p_s per sample, plus d/d(logits)."""
    p_s = masked_softmax(student_logits, mask)
    p_t = np.asarray(teacher_p, dtype=np.float64)
    logp = np.log(np.maximum(p_s, _EPS))
    ce = -(p_t * np.where(mask, logp, 0.0)).sum(axis=-1)
    dlogits = np.where(mask, p_s - p_t, 0.0)
    return ce, dlogits


def distill_loss(student_outs: dict, targets: dict, check: bool = True):
    """Loss over one unroll (or a whole batch stacked [T, B, ...]).

    student_outs: forward_seq outputs (what/who/how_x/how_y logits, values).
    targets: teacher distributions per head, teacher value heads, masks.
    Returns (loss, parts, douts): loss is the plain sum over samples, parts
    splits policy/value, douts feeds backward_seq unscaled (callers divide
    by sample count for optimizer steps).
    """
    mask_what = targets["mask_what"]
    mask_who = targets["mask_who"]
    bins_mask = np.ones(student_outs["how_x"].shape, dtype=bool)
    if check:
        _check_proper(targets["p_what"], mask_what, "what")
        _check_proper(targets["p_who"], mask_who, "who")
        _check_proper(targets["p_how_x"], bins_mask, "how_x")
        _check_proper(targets["p_how_y"], bins_mask, "how_y")

    ce_what, d_what = _ce_head(student_outs["what"], targets["p_what"], mask_what)
    ce_who, d_who = _ce_head(student_outs["who"], targets["p_who"], mask_who)
    ce_hx, d_hx = _ce_head(student_outs["how_x"], targets["p_how_x"], bins_mask)
    ce_hy, d_hy = _ce_head(student_outs["how_y"], targets["p_how_y"], bins_mask)

    v_s = np.asarray(student_outs["values"], dtype=np.float64)
    v_t = np.asarray(targets["t_values"], dtype=np.float64)
    diff = v_s - v_t
    value_term = (diff * diff).sum(axis=-1)

    policy = float((ce_what + ce_who + ce_hx + ce_hy).sum())
    value = float(value_term.sum())
    douts = {
        "d_what": d_what.astype(np.float32),
        "d_who": d_who.astype(np.float32),
        "d_how_x": d_hx.astype(np.float32),
        "d_how_y": d_hy.astype(np.float32),
        "d_values": (2.0 * diff).astype(np.float32),
    }
    return policy + value, {"policy": policy, "value": value}, douts
