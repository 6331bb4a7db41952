"""Recurrent actor-critic network with hand-written gradients.

Layout per step: a dense scalar encoder and a strided-conv spatial encoder
merge into an LSTM; the LSTM output feeds four independent policy heads
(what / who / how_x / how_y) and, together with an encoding of fog-hidden
enemy state, a five-head value trunk. The who head scores units by dot
product between a query from the LSTM and per-unit keys, so its width tracks
the unit stack automatically.

The fog-hidden features enter after the LSTM and only on the value side:
policy logits are structurally incapable of depending on them, which keeps
the information asymmetry honest (critic sees everything during training,
the acting policy never does).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..util import philox
from .layers import (affine, affine_bwd, conv2d, conv2d_bwd, lstm_step,
                     lstm_step_bwd, relu, relu_bwd)

VALUE_TRUNK = 32
HIDDEN_ENC = 32
D_KEY = 24


@dataclass(frozen=True)
class ModelConfig:
    scalar_dim: int
    n_stack: int
    f_unit: int
    spatial_shape: tuple
    hidden_dim: int
    n_what: int
    n_bins: int
    width: int                 # LSTM width; the teacher preset halves it
    sc_hidden: int = 128
    conv_ch: tuple = (8, 8)

    @property
    def sp_hidden(self) -> int:
        return self.width // 2

    def spatial_flat(self) -> int:
        c, h, w = self.spatial_shape
        h1 = (h - 3) // 2 + 1
        w1 = (w - 3) // 2 + 1
        h2 = (h1 - 3) // 2 + 1
        w2 = (w1 - 3) // 2 + 1
        return self.conv_ch[1] * h2 * w2


def teacher_config(sizes: dict) -> ModelConfig:
    return _config_from_sizes(sizes, width=64)


def final_config(sizes: dict) -> ModelConfig:
    return _config_from_sizes(sizes, width=128)


def _config_from_sizes(sizes: dict, width: int) -> ModelConfig:
    return ModelConfig(
        scalar_dim=sizes["scalar_dim"], n_stack=sizes["n_stack"],
        f_unit=sizes["f_unit"], spatial_shape=tuple(sizes["spatial_shape"]),
        hidden_dim=sizes["hidden_dim"], n_what=sizes["n_what"],
        n_bins=sizes["n_bins"], width=width,
    )


class PolicyValueNet:
    def __init__(self, cfg: ModelConfig, params: dict[str, np.ndarray] | None = None,
                 seed: int = 0):
        self.cfg = cfg
        self.params = params if params is not None else init_params(cfg, seed)

    # ------------------------------------------------------------- structure

    def param_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def zero_state(self, batch: int, dtype=np.float32):
        w = self.cfg.width
        return np.zeros((batch, w), dtype=dtype), np.zeros((batch, w), dtype=dtype)

    def descriptor(self) -> dict:
        d = asdict(self.cfg)
        d["spatial_shape"] = list(d["spatial_shape"])
        d["conv_ch"] = list(d["conv_ch"])
        return d

    # --------------------------------------------------------------- forward

    def step(self, obs: dict, h: np.ndarray, c: np.ndarray):
        """Single-tick forward for a batch of independent requests.

        obs arrays: scalar [B,S], units [B,K,F], spatial [B,C,H,W],
        hidden [B,Dh]. Row results are batch-composition invariant.
        """
        seq = {k: v[None] for k, v in obs.items()}
        outs, _ = self.forward_seq(seq, h, c, want_cache=False)
        return {"what": outs["what"][0], "who": outs["who"][0],
                "how_x": outs["how_x"][0], "how_y": outs["how_y"][0],
                "values": outs["values"][0], "h": outs["h"], "c": outs["c"]}

    def forward_seq(self, seq: dict, h0: np.ndarray, c0: np.ndarray,
                    want_cache: bool = True, dtype=None):
        """Unroll over seq arrays shaped [T, B, ...]. Returns (outs, cache)."""
        p = self.params
        if dtype is not None and next(iter(p.values())).dtype != dtype:
            p = {k: v.astype(dtype) for k, v in p.items()}
        T, B = seq["scalar"].shape[:2]
        cast = (lambda a: a) if dtype is None else (lambda a: a.astype(dtype))
        h, c = cast(h0.copy()), cast(c0.copy())
        dk_scale = 1.0 / np.sqrt(D_KEY)

        outs = {k: [] for k in ("what", "who", "how_x", "how_y", "values")}
        caches = []
        for t in range(T):
            sc = cast(seq["scalar"][t])
            un = cast(seq["units"][t])
            sp = cast(seq["spatial"][t])
            hid = cast(seq["hidden"][t])

            a1, ca1 = affine(sc, p["sc1_w"], p["sc1_b"]); r1, cr1 = relu(a1)
            a2, ca2 = affine(r1, p["sc2_w"], p["sc2_b"]); r2, cr2 = relu(a2)

            v1c, cc1 = conv2d(sp, p["cv1_w"], p["cv1_b"]); rc1, crc1 = relu(v1c)
            v2c, cc2 = conv2d(rc1, p["cv2_w"], p["cv2_b"]); rc2, crc2 = relu(v2c)
            flat = rc2.reshape(B, -1)
            a3, ca3 = affine(flat, p["sp_w"], p["sp_b"]); r3, cr3 = relu(a3)

            ak, cak = affine(un, p["key_w"], p["key_b"]); keys, crk = relu(ak)

            mg_in = np.concatenate([r2, r3], axis=-1)
            a4, ca4 = affine(mg_in, p["mg_w"], p["mg_b"]); r4, cr4 = relu(a4)

            h, c, clstm = lstm_step(r4, h, c, p["lstm_wx"], p["lstm_wh"], p["lstm_b"])

            what, cwhat = affine(h, p["what_w"], p["what_b"])
            q, cq = affine(h, p["q_w"], p["q_b"])
            who = np.einsum("bkd,bd->bk", keys, q) * dk_scale
            hx, chx = affine(h, p["hx_w"], p["hx_b"])
            hy, chy = affine(h, p["hy_w"], p["hy_b"])

            ah, cah = affine(hid, p["hid_w"], p["hid_b"]); rh, crh = relu(ah)
            v_in = np.concatenate([h, rh], axis=-1)
            av, cav = affine(v_in, p["v1_w"], p["v1_b"]); rv, crv = relu(av)
            values, cvv = affine(rv, p["v2_w"], p["v2_b"])

            outs["what"].append(what); outs["who"].append(who)
            outs["how_x"].append(hx); outs["how_y"].append(hy)
            outs["values"].append(values)
            if want_cache:
                caches.append((ca1, cr1, ca2, cr2, cc1, crc1, cc2, crc2, ca3, cr3,
                               cak, crk, ca4, cr4, clstm, cwhat, cq, keys, q,
                               chx, chy, cah, crh, cav, crv, cvv, rc2.shape))

        result = {k: np.stack(v) for k, v in outs.items()}
        result["h"], result["c"] = h, c
        cache = (caches, T, B, p) if want_cache else None
        return result, cache

    # -------------------------------------------------------------- backward

    def backward_seq(self, cache, douts: dict, want_input_grads: bool = False):
        """Backprop through the cached unroll.

        douts: d_what [T,B,n_what], d_who [T,B,K], d_how_x/d_how_y [T,B,bins],
        d_values [T,B,5]. No gradient flows out through the final (h, c).
        Returns grads keyed like params (plus input grads if requested).
        """
        caches, T, B, p = cache
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        igrads = {k: [] for k in ("scalar", "units", "spatial", "hidden")} \
            if want_input_grads else None
        dk_scale = 1.0 / np.sqrt(D_KEY)
        w = self.cfg.width
        ref = next(iter(p.values()))
        dh_next = np.zeros((B, w), dtype=ref.dtype)
        dc_next = np.zeros((B, w), dtype=ref.dtype)

        for t in reversed(range(T)):
            (ca1, cr1, ca2, cr2, cc1, crc1, cc2, crc2, ca3, cr3,
             cak, crk, ca4, cr4, clstm, cwhat, cq, keys, q,
             chx, chy, cah, crh, cav, crv, cvv, rc2_shape) = caches[t]

            dvalues = douts["d_values"][t]
            drv, dv2w, dv2b = affine_bwd(dvalues, cvv)
            grads["v2_w"] += dv2w; grads["v2_b"] += dv2b
            dav = relu_bwd(drv, crv)
            dv_in, dv1w, dv1b = affine_bwd(dav, cav)
            grads["v1_w"] += dv1w; grads["v1_b"] += dv1b
            dh_from_v = dv_in[:, :w]
            drh = dv_in[:, w:]
            dah = relu_bwd(drh, crh)
            dhid, dhw, dhb = affine_bwd(dah, cah)
            grads["hid_w"] += dhw; grads["hid_b"] += dhb

            dh = dh_next + dh_from_v
            dwhat = douts["d_what"][t]
            dh_w, dww, dwb = affine_bwd(dwhat, cwhat)
            grads["what_w"] += dww; grads["what_b"] += dwb
            dh += dh_w

            dwho = douts["d_who"][t] * dk_scale
            dq = np.einsum("bk,bkd->bd", dwho, keys)
            dkeys = np.einsum("bk,bd->bkd", dwho, q)
            dh_q, dqw, dqb = affine_bwd(dq, cq)
            grads["q_w"] += dqw; grads["q_b"] += dqb
            dh += dh_q

            dhx = douts["d_how_x"][t]
            dh_x, dxw, dxb = affine_bwd(dhx, chx)
            grads["hx_w"] += dxw; grads["hx_b"] += dxb
            dh += dh_x
            dhy = douts["d_how_y"][t]
            dh_y, dyw, dyb = affine_bwd(dhy, chy)
            grads["hy_w"] += dyw; grads["hy_b"] += dyb
            dh += dh_y

            dr4, dh_prev, dc_prev, dwx, dwh, dlb = lstm_step_bwd(dh, dc_next, clstm)
            grads["lstm_wx"] += dwx; grads["lstm_wh"] += dwh; grads["lstm_b"] += dlb

            da4 = relu_bwd(dr4, cr4)
            dmg_in, dmw, dmb = affine_bwd(da4, ca4)
            grads["mg_w"] += dmw; grads["mg_b"] += dmb
            dr2 = dmg_in[:, :self.cfg.width]
            dr3 = dmg_in[:, self.cfg.width:]

            dak = relu_bwd(dkeys, crk)
            dunits, dkw, dkb = affine_bwd(dak, cak)
            grads["key_w"] += dkw; grads["key_b"] += dkb

            da3 = relu_bwd(dr3, cr3)
            dflat, dspw, dspb = affine_bwd(da3, ca3)
            grads["sp_w"] += dspw; grads["sp_b"] += dspb
            drc2 = dflat.reshape(rc2_shape)
            dv2c = relu_bwd(drc2, crc2)
            drc1, dc2w, dc2b = conv2d_bwd(dv2c, cc2)
            grads["cv2_w"] += dc2w; grads["cv2_b"] += dc2b
            dv1c = relu_bwd(drc1, crc1)
            dspatial, dc1w, dc1b = conv2d_bwd(dv1c, cc1)
            grads["cv1_w"] += dc1w; grads["cv1_b"] += dc1b

            da2 = relu_bwd(dr2, cr2)
            dr1, d2w, d2b = affine_bwd(da2, ca2)
            grads["sc2_w"] += d2w; grads["sc2_b"] += d2b
            da1 = relu_bwd(dr1, cr1)
            dscalar, d1w, d1b = affine_bwd(da1, ca1)
            grads["sc1_w"] += d1w; grads["sc1_b"] += d1b

            dh_next, dc_next = dh_prev, dc_prev
            if want_input_grads:
                igrads["scalar"].append(dscalar)
                igrads["units"].append(dunits)
                igrads["spatial"].append(dspatial)
                igrads["hidden"].append(dhid)

        if want_input_grads:
            ig = {k: np.stack(v[::-1]) for k, v in igrads.items()}
            return grads, ig
        return grads


def init_params(cfg: ModelConfig, seed: int = 0) -> dict[str, np.ndarray]:
    """Scaled-uniform init from per-parameter counter-based streams; near-zero
    head weights so the initial policy is close to uniform over legal acts."""
    w, sh, dk = cfg.width, cfg.sc_hidden, D_KEY
    c1, c2 = cfg.conv_ch
    cin = cfg.spatial_shape[0]
    shapes = {
        "sc1_w": (cfg.scalar_dim, sh), "sc1_b": (sh,),
        "sc2_w": (sh, w), "sc2_b": (w,),
        "cv1_w": (9 * cin, c1), "cv1_b": (c1,),
        "cv2_w": (9 * c1, c2), "cv2_b": (c2,),
        "sp_w": (cfg.spatial_flat(), cfg.sp_hidden), "sp_b": (cfg.sp_hidden,),
        "key_w": (cfg.f_unit, dk), "key_b": (dk,),
        "mg_w": (w + cfg.sp_hidden, w), "mg_b": (w,),
        "lstm_wx": (w, 4 * w), "lstm_wh": (w, 4 * w), "lstm_b": (4 * w,),
        "what_w": (w, cfg.n_what), "what_b": (cfg.n_what,),
        "q_w": (w, dk), "q_b": (dk,),
        "hx_w": (w, cfg.n_bins), "hx_b": (cfg.n_bins,),
        "hy_w": (w, cfg.n_bins), "hy_b": (cfg.n_bins,),
        "hid_w": (cfg.hidden_dim, HIDDEN_ENC), "hid_b": (HIDDEN_ENC,),
        "v1_w": (w + HIDDEN_ENC, VALUE_TRUNK), "v1_b": (VALUE_TRUNK,),
        "v2_w": (VALUE_TRUNK, 5), "v2_b": (5,),
    }
    heads = {"what_w", "q_w", "hx_w", "hy_w", "v2_w"}
    params = {}
    for i, name in enumerate(sorted(shapes)):
        shape = shapes[name]
        rng = philox(seed ^ 0x9E3779B9, 1000 + i)
        if name.endswith("_b"):
            arr = np.zeros(shape, dtype=np.float32)
        elif name in heads:
            arr = (0.01 * (2.0 * rng.random(shape) - 1.0)).astype(np.float32)
        else:
            fan_in = shape[0]
            limit = np.sqrt(6.0 / fan_in)
            arr = (limit * (2.0 * rng.random(shape) - 1.0)).astype(np.float32)
        params[name] = arr
    params["lstm_b"][cfg.width:2 * cfg.width] = 1.0   # forget-gate bias
    return params
