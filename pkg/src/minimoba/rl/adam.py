"""Adam with optional global-norm gradient clipping."""

from __future__ import annotations

import numpy as np


class Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                 max_grad_norm: float | None = 10.0):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.max_grad_norm = max_grad_norm
        self.t = 0
        self.m = {k: np.zeros_like(v, dtype=np.float32) for k, v in params.items()}
        self.v = {k: np.zeros_like(v, dtype=np.float32) for k, v in params.items()}

    def global_norm(self, grads: dict[str, np.ndarray]) -> float:
        sq = 0.0
        for g in grads.values():
            sq += float(np.sum(np.asarray(g, dtype=np.float64) ** 2))
        return float(np.sqrt(sq))

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> dict:
        """Update params in place; returns stats (pre-clip norm, clip factor)."""
        norm = self.global_norm(grads)
        scale = 1.0
        if self.max_grad_norm is not None and norm > self.max_grad_norm > 0:
            scale = self.max_grad_norm / (norm + 1e-12)
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for k, p in params.items():
            g = np.asarray(grads[k], dtype=np.float32) * scale
            m = self.m[k]
            v = self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= (self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)).astype(p.dtype)
        return {"grad_norm": norm, "clip_scale": scale, "t": self.t}
