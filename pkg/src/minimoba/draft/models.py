"""Win-rate predictor and draft value network.

Both are small 3-layer dense nets over multi-hot lineup encodings, trained
with hand-written gradients. The predictor scores complete lineups; the value
net scores partial drafts so tree search can stop at any depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..net.layers import affine, affine_bwd, relu, relu_bwd
from ..rl.adam import Adam
from ..util import philox

# antisymmetric component is snapped to this grid so that the predicted
# win rates of a matchup and its mirror sum to 1.0 exactly in floats
_ANTISYM_QUANTUM = 2.0 ** -20


def _mlp_init(sizes: tuple[int, ...], seed: int) -> dict[str, np.ndarray]:
    params = {}
    for i in range(len(sizes) - 1):
        rng = philox(seed ^ 0x5DEECE66D, 7000 + i)
        fan_in = sizes[i]
        limit = np.sqrt(6.0 / fan_in)
        params[f"w{i}"] = (limit * (2.0 * rng.random((fan_in, sizes[i + 1])) - 1.0)
                           ).astype(np.float32)
        params[f"b{i}"] = np.zeros(sizes[i + 1], dtype=np.float32)
    return params


def _mlp_forward(params: dict, x: np.ndarray, n_layers: int):
    """Returns (logits [B], cache). Hidden layers relu, output linear."""
    h = x.astype(np.float32)
    caches = []
    for i in range(n_layers):
        w = params[f"w{i}"]
        z, _ = affine(h, w, params[f"b{i}"])
        if i < n_layers - 1:
            nxt, rmask = relu(z)
        else:
            nxt, rmask = z, None
        caches.append((h, w, rmask))
        h = nxt
    return h[:, 0], caches


def _mlp_backward(params: dict, caches, dlogit: np.ndarray, n_layers: int) -> dict:
    grads = {}
    dh = dlogit[:, None].astype(np.float32)
    for i in reversed(range(n_layers)):
        x, w, rmask = caches[i]
        dz = dh if rmask is None else relu_bwd(dh, rmask)
        dx, dw, db = affine_bwd(dz, (x, w))
        grads[f"w{i}"] = dw
        grads[f"b{i}"] = db
        dh = dx
    return grads


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z.astype(np.float64)))


def encode_lineup(pool_size: int, a_ids, b_ids) -> np.ndarray:
    """Complete-lineup encoding: [team A multi-hot | team B multi-hot]."""
    x = np.zeros(2 * pool_size, dtype=np.float32)
    for i in a_ids:
        x[int(i)] = 1.0
    for i in b_ids:
        x[pool_size + int(i)] = 1.0
    return x


def encode_draft(pool_size: int, state) -> np.ndarray:
    """Partial-draft encoding: picked multi-hots for both teams, the
    unpicked remainder of the pool, and a 2-wide team-to-pick one-hot
    (all zero once the draft is complete)."""
    x = np.zeros(3 * pool_size + 2, dtype=np.float32)
    for i in state.picks_a:
        x[int(i)] = 1.0
    for i in state.picks_b:
        x[pool_size + int(i)] = 1.0
    taken = set(state.picks_a) | set(state.picks_b)
    for i in range(pool_size):
        if i not in taken:
            x[2 * pool_size + i] = 1.0
    if not state.terminal:
        x[3 * pool_size + state.team_to_pick] = 1.0
    return x


@dataclass
class WinratePredictor:
    pool_size: int
    params: dict

    N_LAYERS = 3

    @classmethod
    def create(cls, pool_size: int, hidden: int = 64, seed: int = 0):
        sizes = (2 * pool_size, hidden, hidden, 1)
        return cls(pool_size, _mlp_init(sizes, seed))

    def raw(self, x: np.ndarray) -> np.ndarray:
        """Unsymmetrized win probability for encoded lineups [B, 2P]."""
        logits, _ = _mlp_forward(self.params, np.atleast_2d(x), self.N_LAYERS)
        return _sigmoid(logits)

    def predict(self, a_ids, b_ids) -> float:
        """p(team A beats team B), antisymmetrized so that
        predict(a, b) + predict(b, a) == 1.0 exactly."""
        f_ab = float(self.raw(encode_lineup(self.pool_size, a_ids, b_ids))[0])
        f_ba = float(self.raw(encode_lineup(self.pool_size, b_ids, a_ids))[0])
        # rint is sign symmetric, so the mirror matchup lands on exactly -d
        # and 0.5 +/- d are both exact on the quantum grid
        d = float(np.rint(0.5 * (f_ab - f_ba) / _ANTISYM_QUANTUM)) * _ANTISYM_QUANTUM
        return 0.5 + d


@dataclass
class DraftValueNet:
    pool_size: int
    params: dict

    N_LAYERS = 3

    @classmethod
    def create(cls, pool_size: int, hidden: int = 64, seed: int = 0):
        sizes = (3 * pool_size + 2, hidden, hidden, 1)
        return cls(pool_size, _mlp_init(sizes, seed))

    def value(self, state) -> float:
        """p(team A wins the eventual match) for a partial draft."""
        x = encode_draft(self.pool_size, state)
        logits, _ = _mlp_forward(self.params, x[None, :], self.N_LAYERS)
        return float(_sigmoid(logits)[0])

    def value_batch(self, xs: np.ndarray) -> np.ndarray:
        logits, _ = _mlp_forward(self.params, xs, self.N_LAYERS)
        return _sigmoid(logits)


def train_winrate_predictor(rows, pool_size: int, team_size: int,
                            hidden: int = 64, epochs: int = 40,
                            batch_size: int = 256, lr: float = 1e-3,
                            seed: int = 0, holdout_frac: float = 0.1) -> tuple:
    """Fit the predictor on (lineup, binary outcome) rows.

    rows: iterable of dicts with "a", "b" (hero id lists) and "winner" (0/1).
    Each row is mirrored (teams swapped, outcome flipped) so the raw net sees
    both orientations. Returns (predictor, report) where report carries the
    held-out accuracy and log loss.
    """
    rows = list(rows)
    X, y = [], []
    for idx, r in enumerate(rows):
        if len(r["a"]) != team_size or len(r["b"]) != team_size:
            raise ValueError(f"row {idx}: incomplete lineup")
        if r["winner"] not in (0, 1):
            raise ValueError(f"row {idx}: outcome must be 0 or 1, got {r['winner']}")
        X.append(encode_lineup(pool_size, r["a"], r["b"]))
        y.append(1.0 if r["winner"] == 0 else 0.0)
        X.append(encode_lineup(pool_size, r["b"], r["a"]))
        y.append(1.0 - y[-1])
    X = np.stack(X)
    y = np.asarray(y, dtype=np.float64)

    rng = philox(seed, 0xD0)
    perm = rng.permutation(len(X))
    X, y = X[perm], y[perm]
    n_hold = max(2, int(len(X) * holdout_frac))
    Xh, yh = X[:n_hold], y[:n_hold]
    Xt, yt = X[n_hold:], y[n_hold:]

    net = WinratePredictor.create(pool_size, hidden=hidden, seed=seed)
    opt = Adam(net.params, lr=lr)
    n = len(Xt)
    for ep in range(epochs):
        order = philox(seed, 0xE0 + ep).permutation(n)
        for s in range(0, n, batch_size):
            sel = order[s:s + batch_size]
            logits, cache = _mlp_forward(net.params, Xt[sel], net.N_LAYERS)
            p = _sigmoid(logits)
            dlogit = (p - yt[sel]) / len(sel)
            grads = _mlp_backward(net.params, cache, dlogit, net.N_LAYERS)
            opt.step(net.params, grads)

    ph = net.raw(Xh)
    eps = 1e-12
    report = {
        "holdout_acc": float(np.mean((ph > 0.5) == (yh > 0.5))),
        "holdout_logloss": float(-np.mean(yh * np.log(ph + eps)
                                          + (1 - yh) * np.log(1 - ph + eps))),
        "n_train": int(n),
        "n_holdout": int(n_hold),
    }
    return net, report


def train_value_net(X: np.ndarray, y: np.ndarray, pool_size: int,
                    hidden: int = 64, epochs: int = 60, batch_size: int = 256,
                    lr: float = 1e-3, seed: int = 0) -> DraftValueNet:
    """MSE-fit the draft value net. X: encoded states [N, 3P+2], y: terminal
    predictor values in [0,1], one per state (all states of a draft share
    the draft's terminal label)."""
    X = np.asarray(X, dtype=np.float32)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X and y must be aligned 2d/1d arrays")
    if not np.isfinite(y).all():
        raise ValueError("unlabeled states: labels must be finite")
    net = DraftValueNet.create(pool_size, hidden=hidden, seed=seed)
    opt = Adam(net.params, lr=lr)
    n = len(X)
    for ep in range(epochs):
        order = philox(seed, 0xF0 + ep).permutation(n)
        for s in range(0, n, batch_size):
            sel = order[s:s + batch_size]
            logits, cache = _mlp_forward(net.params, X[sel], net.N_LAYERS)
            p = _sigmoid(logits)
            # d/dlogit of mean (p - y)^2 with p = sigmoid(logit)
            dlogit = 2.0 * (p - y[sel]) * p * (1.0 - p) / len(sel)
            grads = _mlp_backward(net.params, cache, dlogit, net.N_LAYERS)
            opt.step(net.params, grads)
    return net
