"""Contrastive training of the fused embedding against frozen text targets.

Mini-batch gradient descent with decoupled weight decay (AdamW) and an
exponentially decaying learning rate. Both the fused embedding and the
text embedding are l2-normalized immediately before the loss.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..config import EmbedSettings, FusionSettings, LossSettings, TrainSettings
from ..errors import NonFiniteLoss
from .autodiff import Tensor, l2_normalize
from .encoders import encode_motion_batch, encode_text, encode_video_batch
from .fusion import fuse, project
from .losses import LOSS_FNS
from .params import trainable


def lr_schedule(epoch: int, cfg: TrainSettings) -> float:
    """lr(e) = lr_start * (lr_end / lr_start)^(e / epochs)."""
    if not 0 <= epoch <= cfg.epochs:
        raise ValueError(f"epoch {epoch} outside [0, {cfg.epochs}]")
    return cfg.lr_start * (cfg.lr_end / cfg.lr_start) ** (epoch / cfg.epochs)


class AdamW:
    """Adam with decoupled weight decay over a named parameter dict."""

    def __init__(
        self,
        params: Dict[str, Tensor],
        weight_decay: float = 1e-2,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = trainable(params)
        self.weight_decay = weight_decay
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.step_count = 0
        self._m = {k: np.zeros_like(v.data) for k, v in self.params.items()}
        self._v = {k: np.zeros_like(v.data) for k, v in self.params.items()}
        self._scratch = {k: np.zeros_like(v.data) for k, v in self.params.items()}

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None

    def step(self, lr: float):
        self.step_count += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.step_count
        bias2 = 1.0 - b2**self.step_count
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            m = self._m[name]
            v = self._v[name]
            buf = self._scratch[name]
            m *= b1
            np.multiply(g, 1.0 - b1, out=buf)
            m += buf
            v *= b2
            np.multiply(g, g, out=buf)     # g may be aliased; never mutate it
            buf *= 1.0 - b2
            v += buf
            np.divide(v, bias2, out=buf)
            np.sqrt(buf, out=buf)
            buf += self.eps
            np.divide(m, buf, out=buf)
            buf *= lr / bias1
            p.data *= 1.0 - lr * self.weight_decay  # decoupled decay
            p.data -= buf


@dataclass
class TrainingBatch:
    """Precomputed encoder inputs for a set of samples."""

    motion: np.ndarray        # (N, 1440)
    video: np.ndarray         # (N, F) pooled patch features
    texts: List[str]          # first annotation per sample
    ids: List[str]


@dataclass
class TrainResult:
    params: Dict[str, Tensor]
    history: List[float]      # mean loss per epoch
    text_targets: np.ndarray  # (N, D) frozen, l2-normalized


def _forward_loss(
    params: Dict[str, Tensor],
    motion: np.ndarray,
    video: np.ndarray,
    targets: np.ndarray,
    fusion_cfg: FusionSettings,
    loss_cfg: LossSettings,
    rng: Optional[np.random.Generator],
    train: bool,
) -> Tensor:
    f_m = encode_motion_batch(Tensor(motion), params)
    f_v = encode_video_batch(Tensor(video), params)
    f_k = fuse(f_m, f_v, params, fusion_cfg)
    f_z = project(f_k, params, fusion_cfg, rng=rng, train=train)
    f_z = l2_normalize(f_z)
    f_t = Tensor(targets)  # already unit rows; frozen text encoder
    return LOSS_FNS[loss_cfg.kind](f_z, f_t, loss_cfg.tau)


def encode_text_targets(
    texts: Sequence[str], params: Dict[str, Tensor], embed_cfg: EmbedSettings
) -> np.ndarray:
    """Unit-norm text embeddings from the frozen encoder, cached per text."""
    cache: Dict[str, np.ndarray] = {}
    rows = []
    for text in texts:
        if text not in cache:
            vec = encode_text(text, params, embed_cfg).data
            cache[text] = vec / np.linalg.norm(vec)
        rows.append(cache[text])
    return np.asarray(rows)


def train(
    data: TrainingBatch,
    params: Dict[str, Tensor],
    fusion_cfg: FusionSettings,
    loss_cfg: LossSettings,
    train_cfg: TrainSettings,
    embed_cfg: EmbedSettings,
) -> TrainResult:
    """Optimize encoder + fusion + projection parameters in place.

    Deterministic given train_cfg.seed: epoch shuffles and dropout masks
    derive from one seeded generator. Raises NonFiniteLoss with step
    diagnostics if the loss leaves the reals.
    """
    n = data.motion.shape[0]
    targets = encode_text_targets(data.texts, params, embed_cfg)
    optimizer = AdamW(params, weight_decay=train_cfg.weight_decay)
    rng = np.random.default_rng(train_cfg.seed)

    history: List[float] = []
    for epoch in range(train_cfg.epochs):
        lr = lr_schedule(epoch, train_cfg)
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, train_cfg.batch_size):
            idx = order[start : start + train_cfg.batch_size]
            optimizer.zero_grad()
            loss = _forward_loss(
                params,
                data.motion[idx],
                data.video[idx],
                targets[idx],
                fusion_cfg,
                loss_cfg,
                rng=rng,
                train=True,
            )
            value = loss.item()
            if not np.isfinite(value):
                raise NonFiniteLoss(
                    f"loss={value} at epoch {epoch} step {start // train_cfg.batch_size} "
                    f"(lr={lr:.3e}, batch ids {[data.ids[i] for i in idx]})"
                )
            loss.backward()
            optimizer.step(lr)
            epoch_loss += value * len(idx)
        history.append(epoch_loss / n)
    return TrainResult(params=params, history=history, text_targets=targets)


def embed_scene_batch(
    params: Dict[str, Tensor],
    motion: np.ndarray,
    video: np.ndarray,
    fusion_cfg: FusionSettings,
) -> np.ndarray:
    """Eval-mode fused embeddings, l2-normalized, as plain arrays."""
    f_m = encode_motion_batch(Tensor(motion), params)
    f_v = encode_video_batch(Tensor(video), params)
    f_z = project(fuse(f_m, f_v, params, fusion_cfg), params, fusion_cfg, train=False)
    return np.asarray(l2_normalize(f_z).data)
