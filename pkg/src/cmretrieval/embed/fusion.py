"""Fusing motion and video embeddings into a single representation.

Three strategies: concatenation (R^2D), bilinear pooling via the flattened
outer product (R^D^2), and multi-head self-attention over the two modality
tokens with mean pooling (R^D). The fused vector then passes through layer
normalization, dropout, and a single-hidden-layer MLP projection back to R^D.
"""

from __future__ import annotations

from math import sqrt
from typing import Optional

import numpy as np

from ..config import FusionSettings
from ..errors import DimMismatch
from .autodiff import (
    Tensor,
    concat,
    dropout,
    layer_norm,
    linear,
    mul,
    reshape,
    softmax,
    tanh,
    tmean,
    transpose,
    tsum,
)


def fused_dim(d: int, cfg: FusionSettings) -> int:
    return {"concat": 2 * d, "bilinear": d * d, "attention": d}[cfg.strategy]


def _as_batch(x: Tensor) -> tuple[Tensor, bool]:
    if x.ndim == 1:
        return reshape(x, (1, -1)), True
    return x, False


def fuse(f_m: Tensor, f_v: Tensor, params: dict, cfg: FusionSettings) -> Tensor:
    """Combine (N, D) motion and video embeddings into (N, K)."""
    f_m, squeeze = _as_batch(f_m)
    f_v, _ = _as_batch(f_v)
    if f_m.shape != f_v.shape:
        raise DimMismatch(f"modality shapes differ: {f_m.shape} vs {f_v.shape}")
    n, d = f_m.shape

    if cfg.strategy == "concat":
        out = concat([f_m, f_v], axis=1)
    elif cfg.strategy == "bilinear":
        outer = mul(reshape(f_m, (n, d, 1)), reshape(f_v, (n, 1, d)))
        out = reshape(outer, (n, d * d))
    elif cfg.strategy == "attention":
        out = _attention_fuse(f_m, f_v, params, cfg)
    else:
        raise DimMismatch(f"unknown strategy {cfg.strategy!r}")
    return reshape(out, (-1,)) if squeeze else out


def _attention_fuse(f_m: Tensor, f_v: Tensor, params: dict, cfg: FusionSettings) -> Tensor:
    """One multi-head self-attention layer over the two modality tokens,
    outputs averaged. With two tokens the row softmax is a 2-way gate,
    which keeps everything in cheap 2D matmuls."""
    n, d = f_m.shape
    heads = cfg.attention_heads
    if d % heads:
        raise DimMismatch(f"heads={heads} must divide D={d}")
    dh = d // heads
    scale = 1.0 / sqrt(dh)

    def proj(x, name):
        return linear(x, params[name])

    q = {"m": proj(f_m, "fusion.wq"), "v": proj(f_v, "fusion.wq")}
    k = {"m": proj(f_m, "fusion.wk"), "v": proj(f_v, "fusion.wk")}
    va = {"m": proj(f_m, "fusion.wv"), "v": proj(f_v, "fusion.wv")}

    out_tokens = []
    for token in ("m", "v"):
        head_outputs = []
        for h in range(heads):
            cols = (slice(None), slice(h * dh, (h + 1) * dh))
            qh = q[token][cols]
            scores = concat(
                [
                    reshape(mul(tsum(mul(qh, k[other][cols]), axis=1), scale), (n, 1))
                    for other in ("m", "v")
                ],
                axis=1,
            )                                   # (N, 2)
            attn = softmax(scores, axis=1)
            head = mul(attn[:, 0:1], va["m"][cols]) + mul(attn[:, 1:2], va["v"][cols])
            head_outputs.append(head)
        out_tokens.append(linear(concat(head_outputs, axis=1), params["fusion.wo"]))
    return mul(out_tokens[0] + out_tokens[1], 0.5)


def project(
    f_k: Tensor,
    params: dict,
    cfg: FusionSettings,
    rng: Optional[np.random.Generator] = None,
    train: bool = False,
) -> Tensor:
    """Layer norm -> dropout (train only) -> affine-tanh-affine -> R^D."""
    f_k, squeeze = _as_batch(f_k)
    expected = params["proj.w1"].shape[0]
    if f_k.shape[1] != expected:
        raise DimMismatch(f"fused dim {f_k.shape[1]}, projection expects {expected}")
    x = layer_norm(f_k, params["proj.ln_g"], params["proj.ln_b"])
    if train:
        if rng is None:
            raise ValueError("train-mode projection needs an rng for dropout")
        x = dropout(x, cfg.dropout_p, rng, train=True)
    hidden = tanh(linear(x, params["proj.w1"], params["proj.b1"]))
    out = linear(hidden, params["proj.w2"], params["proj.b2"])
    return reshape(out, (-1,)) if squeeze else out


def fuse_project(
    f_m: Tensor,
    f_v: Tensor,
    params: dict,
    cfg: FusionSettings,
    rng: Optional[np.random.Generator] = None,
    train: bool = False,
) -> Tensor:
    return project(fuse(f_m, f_v, params, cfg), params, cfg, rng=rng, train=train)
