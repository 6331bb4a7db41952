"""Finite-difference verification of the hand-written backward pass."""

from __future__ import annotations

import numpy as np

from ..util import philox
from .model import PolicyValueNet


def random_batch(net: PolicyValueNet, T: int, B: int, seed: int = 0,
                 dtype=np.float64) -> dict:
    c = net.cfg
    rng = philox(seed, 77)
    return {
        "scalar": rng.random((T, B, c.scalar_dim)).astype(dtype),
        "units": rng.random((T, B, c.n_stack, c.f_unit)).astype(dtype),
        "spatial": rng.random((T, B) + tuple(c.spatial_shape)).astype(dtype),
        "hidden": rng.random((T, B, c.hidden_dim)).astype(dtype),
    }


def scalar_loss(outs: dict, coefs: dict) -> float:
    """Deterministic scalar projection of every head, for finite differences."""
    total = 0.0
    for k in ("what", "who", "how_x", "how_y", "values"):
        total += float(np.sum(outs[k] * coefs[k]))
    return total


def loss_grads(outs: dict, coefs: dict) -> dict:
    return {f"d_{k}": coefs[k].copy() for k in ("what", "who", "how_x", "how_y", "values")}


def gradcheck(net: PolicyValueNet, T: int = 3, B: int = 2, seed: int = 0,
              eps: float = 1e-5, params_subset: list[str] | None = None,
              n_entries: int = 6) -> dict[str, float]:
    """Max relative error per parameter between analytic and central-difference
    gradients, computed in float64. Checks a few entries of each tensor."""
    seq = random_batch(net, T, B, seed)
    h0, c0 = net.zero_state(B, dtype=np.float64)
    rng = philox(seed, 88)

    outs, cache = net.forward_seq(seq, h0, c0, dtype=np.float64)
    coefs = {k: rng.standard_normal(outs[k].shape) for k in
             ("what", "who", "how_x", "how_y", "values")}
    grads = net.backward_seq(cache, loss_grads(outs, coefs))

    names = params_subset or sorted(net.params)
    errors = {}
    f64 = {k: v.astype(np.float64) for k, v in net.params.items()}
    for name in names:
        p = f64[name]
        flat_idx = rng.choice(p.size, size=min(n_entries, p.size), replace=False)
        worst = 0.0
        for fi in flat_idx:
            idx = np.unravel_index(int(fi), p.shape)
            orig = p[idx]
            for sign, store in ((+1, "hi"), (-1, "lo")):
                p[idx] = orig + sign * eps
                probe = PolicyValueNet(net.cfg, f64)
                o, _ = probe.forward_seq(seq, h0, c0, want_cache=False, dtype=np.float64)
                if sign > 0:
                    f_hi = scalar_loss(o, coefs)
                else:
                    f_lo = scalar_loss(o, coefs)
            p[idx] = orig
            num = (f_hi - f_lo) / (2 * eps)
            ana = float(grads[name][idx])
            denom = max(abs(num), abs(ana), 1e-8)
            worst = max(worst, abs(num - ana) / denom)
        errors[name] = worst
    return errors
