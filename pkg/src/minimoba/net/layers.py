"""Network primitives with explicit forward/backward pairs.

All forward affine transforms go through np.einsum rather than BLAS matmul:
einsum reduces each output element independently, so a row's result does not
depend on what else is in the batch. That makes inference bit-identical
whether a request is served alone or inside a large batch, which the batched
inference server and lockstep replay checks rely on. Backward passes have no
such requirement and may use matmul freely.
"""

from __future__ import annotations

import numpy as np


def affine(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """y = x @ w + b over the last axis, batch-composition invariant."""
    if x.ndim == 2:
        y = np.einsum("ij,jk->ik", x, w) + b
    elif x.ndim == 3:
        y = np.einsum("bij,jk->bik", x, w) + b
    else:
        raise ValueError(f"affine expects 2d or 3d input, got {x.ndim}d")
    return y, (x, w)


def affine_bwd(dy: np.ndarray, cache):
    x, w = cache
    if x.ndim == 2:
        dx = dy @ w.T
        dw = x.T @ dy
        db = dy.sum(axis=0)
    else:
        dx = dy @ w.T
        dw = np.einsum("bij,bik->jk", x, dy)
        db = dy.sum(axis=(0, 1))
    return dx, dw, db


def relu(x: np.ndarray):
    y = np.maximum(x, 0)
    return y, (x > 0)


def relu_bwd(dy: np.ndarray, cache):
    return dy * cache


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def im2col(x: np.ndarray, k: int, stride: int):
    """[B, C, H, W] -> [B, P, k*k*C] patches, P = out_h*out_w."""
    b, c, h, w = x.shape
    oh = (h - k) // stride + 1
    ow = (w - k) // stride + 1
    cols = np.empty((b, oh * ow, k * k * c), dtype=x.dtype)
    p = 0
    for i in range(oh):
        for j in range(ow):
            patch = x[:, :, i * stride:i * stride + k, j * stride:j * stride + k]
            cols[:, p, :] = patch.reshape(b, -1)
            p += 1
    return cols, (b, c, h, w, oh, ow)


def col2im(dcols: np.ndarray, k: int, stride: int, dims):
    b, c, h, w, oh, ow = dims
    dx = np.zeros((b, c, h, w), dtype=dcols.dtype)
    p = 0
    for i in range(oh):
        for j in range(ow):
            dx[:, :, i * stride:i * stride + k, j * stride:j * stride + k] += \
                dcols[:, p, :].reshape(b, c, k, k)
            p += 1
    return dx


def conv2d(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 2):
    """Valid conv, w is [k*k*in_ch, out_ch]. Returns [B, out_ch, oh, ow]."""
    k = int(round((w.shape[0] // x.shape[1]) ** 0.5))
    cols, dims = im2col(x, k, stride)
    y, acache = affine(cols, w, b)          # [B, P, out_ch]
    _, _, _, _, oh, ow = dims
    out = y.transpose(0, 2, 1).reshape(x.shape[0], w.shape[1], oh, ow)
    return out, (acache, dims, k, stride, w.shape[1])


def conv2d_bwd(dout: np.ndarray, cache):
    acache, dims, k, stride, out_ch = cache
    b = dout.shape[0]
    dy = dout.reshape(b, out_ch, -1).transpose(0, 2, 1)
    dcols, dw, db = affine_bwd(dy, acache)
    dx = col2im(dcols, k, stride, dims)
    return dx, dw, db


def lstm_step(x: np.ndarray, h: np.ndarray, c: np.ndarray,
              wx: np.ndarray, wh: np.ndarray, b: np.ndarray):
    """One LSTM step. Gate layout along the last axis: input, forget, cell, out."""
    n = h.shape[-1]
    zx, _ = affine(x, wx, b)
    zh, _ = affine(h, wh, np.zeros(4 * n, dtype=b.dtype))
    z = zx + zh
    i = sigmoid(z[:, 0 * n:1 * n])
    f = sigmoid(z[:, 1 * n:2 * n])
    g = np.tanh(z[:, 2 * n:3 * n])
    o = sigmoid(z[:, 3 * n:4 * n])
    c_new = f * c + i * g
    tc = np.tanh(c_new)
    h_new = o * tc
    return h_new, c_new, (x, h, c, i, f, g, o, tc, wx, wh)


def lstm_step_bwd(dh: np.ndarray, dc: np.ndarray, cache):
    """Returns (dx, dh_prev, dc_prev, dwx, dwh, db)."""
    x, h, c, i, f, g, o, tc, wx, wh = cache
    do = dh * tc
    dc_total = dc + dh * o * (1.0 - tc * tc)
    di = dc_total * g
    df = dc_total * c
    dg = dc_total * i
    dc_prev = dc_total * f
    dz = np.concatenate([
        di * i * (1.0 - i),
        df * f * (1.0 - f),
        dg * (1.0 - g * g),
        do * o * (1.0 - o),
    ], axis=-1)
    dx = dz @ wx.T
    dh_prev = dz @ wh.T
    dwx = x.T @ dz
    dwh = h.T @ dz
    db = dz.sum(axis=0)
    return dx, dh_prev, dc_prev, dwx, dwh, db


def masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Softmax over legal entries only. Illegal entries get probability exactly
    0.0 (not merely tiny). Rows with no legal entry collapse to slot 0 by
    convention; callers must never consume such rows."""
    logits = np.asarray(logits, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    neg = np.where(mask, logits, -np.inf)
    mx = np.max(neg, axis=-1, keepdims=True)
    dead = ~np.isfinite(mx)
    mx = np.where(dead, 0.0, mx)
    e = np.exp(neg - mx)
    e = np.where(mask, e, 0.0)
    tot = e.sum(axis=-1, keepdims=True)
    tot = np.where(tot == 0.0, 1.0, tot)
    p = e / tot
    if np.any(dead):
        p = p.copy()
        p[np.broadcast_to(dead, p.shape) & (np.arange(p.shape[-1]) == 0)] = 1.0
    return p


def sample_masked(logits: np.ndarray, mask: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one index from the masked distribution; illegal indices can never
    be returned."""
    p = masked_softmax(logits, mask)
    if p.ndim != 1:
        raise ValueError("sample_masked takes a single distribution")
    cdf = np.cumsum(p)
    r = rng.random() * cdf[-1]
    idx = int(np.searchsorted(cdf, r, side="right"))
    idx = min(idx, len(p) - 1)
    if not mask[idx]:
        legal = np.flatnonzero(mask)
        if legal.size == 0:
            return 0
        idx = int(legal[np.argmax(p[legal])])
    return idx


def log_prob_masked(logits: np.ndarray, mask: np.ndarray, index) -> np.ndarray:
    """log p(index) under the masked softmax, computed stably in float64."""
    p = masked_softmax(logits, mask)
    idx = np.asarray(index)
    picked = np.take_along_axis(p, idx[..., None], axis=-1)[..., 0]
    return np.log(np.maximum(picked, 1e-300))
