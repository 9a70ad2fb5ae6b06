"""Robust locally weighted scatterplot smoothing (LOWESS).

Each point is replaced by a tri-cube-weighted local linear fit over its
nearest neighbors, followed by robustifying rounds of bisquare residual
reweighting (Cleveland 1979).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np


@dataclass(frozen=True)
class LowessConfig:
    frac: float = 0.5
    robust_iters: int = 2

    def __post_init__(self):
        if not 0.0 < self.frac <= 1.0:
            raise ValueError(f"frac must be in (0, 1], got {self.frac}")
        if self.robust_iters < 0:
            raise ValueError("robust_iters must be >= 0")


def _tricube(u: np.ndarray) -> np.ndarray:
    u = np.clip(np.abs(u), 0.0, 1.0)
    return (1.0 - u**3) ** 3


def lowess_smooth(
    series: np.ndarray,
    cfg: LowessConfig = LowessConfig(),
    return_flags: bool = False,
):
    """Smooth a 1D series sampled on a uniform grid.

    Returns the smoothed series; with ``return_flags`` also returns a
    boolean array marking points whose local window degenerated (all
    weights zero), which are passed through unchanged.
    """
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size < 2:
        raise ValueError(f"series must be 1D with n >= 2, got shape {y.shape}")
    n = y.size
    x = np.arange(n, dtype=np.float64)
    q = min(max(int(ceil(cfg.frac * n)), 2), n)

    # Tri-cube weights over the q nearest neighbors of each point. The
    # bandwidth is the q-th smallest distance, so the farthest window
    # point lands on the kernel's zero boundary.
    dist = np.abs(x[:, None] - x[None, :])
    h = np.sort(dist, axis=1)[:, q - 1]
    h = np.maximum(h, 1e-12)
    w = _tricube(dist / h[:, None])

    yest = np.empty(n)
    flags = np.zeros(n, dtype=bool)
    delta = np.ones(n)
    for round_idx in range(cfg.robust_iters + 1):
        for i in range(n):
            wi = delta * w[i]
            sw = wi.sum()
            if sw <= 0.0:
                yest[i] = y[i]
                flags[i] = True
                continue
            flags[i] = False
            # Weighted linear fit centered at x[i]; the intercept is the
            # fitted value. Centering keeps the 2x2 solve well conditioned.
            dx = x - x[i]
            swx = float(wi @ dx)
            swxx = float(wi @ (dx * dx))
            swy = float(wi @ y)
            swxy = float(wi @ (dx * y))
            det = sw * swxx - swx * swx
            if det <= 1e-12 * max(sw * swxx, 1.0):
                yest[i] = swy / sw
            else:
                yest[i] = (swxx * swy - swx * swxy) / det
        if round_idx == cfg.robust_iters:
            break
        residuals = y - yest
        s = float(np.median(np.abs(residuals)))
        if s <= 1e-14 * max(1.0, float(np.max(np.abs(y)))):
            break
        delta = np.clip(residuals / (6.0 * s), -1.0, 1.0)
        delta = (1.0 - delta**2) ** 2

    if return_flags:
        return yest, flags
    return yest


def lowess_smooth_columns(series: np.ndarray, cfg: LowessConfig = LowessConfig()) -> np.ndarray:
    """Apply lowess_smooth independently to each column of a 2D array."""
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected 2D array, got shape {arr.shape}")
    return np.column_stack([lowess_smooth(arr[:, j], cfg) for j in range(arr.shape[1])])
