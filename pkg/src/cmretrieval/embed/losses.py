"""Similarity losses aligning fused embeddings with text embeddings.

Three kinds: cosine distance, soft-target cross-entropy between the
softmax distributions of target and prediction, and symmetric InfoNCE
over in-batch negatives at temperature tau.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimMismatch, ZeroVector
from .autodiff import (
    Tensor,
    as_tensor,
    log_softmax,
    l2_normalize,
    mul,
    reshape,
    softmax,
    take,
    tmean,
    transpose,
    tsum,
)


def _paired(f_z, f_t) -> tuple[Tensor, Tensor]:
    f_z, f_t = as_tensor(f_z), as_tensor(f_t)
    if f_z.ndim == 1:
        f_z = reshape(f_z, (1, -1))
    if f_t.ndim == 1:
        f_t = reshape(f_t, (1, -1))
    if f_z.shape != f_t.shape:
        raise DimMismatch(f"embedding shapes differ: {f_z.shape} vs {f_t.shape}")
    return f_z, f_t


def loss_cosine(f_z, f_t) -> Tensor:
    """1 - cos(f_z, f_t), averaged over the batch; range [0, 2]."""
    f_z, f_t = _paired(f_z, f_t)
    if np.any(np.linalg.norm(f_z.data, axis=1) == 0.0) or np.any(
        np.linalg.norm(f_t.data, axis=1) == 0.0
    ):
        raise ZeroVector("cosine loss needs non-zero vectors")
    cos = tsum(mul(l2_normalize(f_z), l2_normalize(f_t)), axis=1)
    return tmean(1.0 + mul(cos, -1.0))


def loss_soft_ce(f_z, f_t) -> Tensor:
    """Cross-entropy of softmax(f_t) against log-softmax(f_z), averaged."""
    f_z, f_t = _paired(f_z, f_t)
    ce = tsum(mul(softmax(f_t, axis=1), mul(log_softmax(f_z, axis=1), -1.0)), axis=1)
    return tmean(ce)


def loss_infonce(f_z, f_t, tau: float = 0.5) -> Tensor:
    """Symmetric in-batch InfoNCE at temperature tau.

    Rows are expected l2-normalized. Both softmax directions (prediction
    to target and target to prediction) contribute, with the matched
    diagonal pairs as positives: loss = -(1/2N) * sum of both diagonals.
    """
    f_z, f_t = _paired(f_z, f_t)
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    n = f_z.shape[0]
    sims = mul(f_z @ transpose(f_t), 1.0 / tau)      # (N, N)
    diag = (np.arange(n), np.arange(n))
    pos_z = take(log_softmax(sims, axis=1), diag)
    pos_t = take(log_softmax(sims, axis=0), diag)
    total = tsum(pos_z) + tsum(pos_t)
    return mul(total, -1.0 / (2.0 * n))


LOSS_FNS = {
    "cosine": lambda z, t, tau: loss_cosine(z, t),
    "soft_ce": lambda z, t, tau: loss_soft_ce(z, t),
    "infonce": loss_infonce,
}
