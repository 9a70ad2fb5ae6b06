"""Finite-difference verification of the hand-written backward rules."""

from __future__ import annotations

from typing import Callable, Mapping, Optional

import numpy as np

from .autodiff import Tensor

DEFAULT_H = 1e-5
# Below this magnitude both gradients are treated as numerically zero and
# compared absolutely instead of relatively.
SMALL_GRAD = 1e-6


def numeric_gradient(
    fn: Callable[[np.ndarray], float],
    x: np.ndarray,
    h: float = DEFAULT_H,
    coords: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Central finite differences of a scalar function, per coordinate."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.full(x.size, np.nan)
    flat = x.reshape(-1).copy()
    idx = range(x.size) if coords is None else coords
    for i in idx:
        orig = flat[i]
        flat[i] = orig + h
        f_plus = fn(flat.reshape(x.shape))
        flat[i] = orig - h
        f_minus = fn(flat.reshape(x.shape))
        flat[i] = orig
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad.reshape(x.shape)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Max |a - n| / max(|a|, |n|); absolute where both are tiny."""
    analytic = np.asarray(analytic, dtype=np.float64).reshape(-1)
    numeric = np.asarray(numeric, dtype=np.float64).reshape(-1)
    mask = ~np.isnan(numeric)
    analytic, numeric = analytic[mask], numeric[mask]
    denom = np.maximum(np.abs(analytic), np.abs(numeric))
    err = np.abs(analytic - numeric)
    small = denom < SMALL_GRAD
    rel = np.zeros_like(err)
    rel[~small] = err[~small] / denom[~small]
    rel[small] = err[small]  # absolute error in the near-zero regime
    return float(rel.max()) if rel.size else 0.0


def grad_check(
    fn: Callable[[Mapping[str, Tensor]], Tensor],
    point: Mapping[str, np.ndarray],
    h: float = DEFAULT_H,
    max_coords_per_input: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Compare analytic gradients against central finite differences.

    ``fn`` maps a dict of Tensors to a scalar Tensor; ``point`` gives the
    evaluation arrays. For large inputs a seeded random subset of up to
    ``max_coords_per_input`` coordinates per input is probed. Returns the
    max relative error over all probed coordinates.
    """
    rng = np.random.default_rng(seed)
    tensors = {
        name: Tensor(np.asarray(arr, dtype=np.float64), requires_grad=True)
        for name, arr in point.items()
    }
    out = fn(tensors)
    if out.data.size != 1:
        raise ValueError("grad_check requires a scalar-valued function")
    out.backward()

    worst = 0.0
    for name, t in tensors.items():
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        size = t.data.size
        coords = None
        if max_coords_per_input is not None and size > max_coords_per_input:
            coords = rng.choice(size, size=max_coords_per_input, replace=False)

        def scalar_fn(arr, _name=name):
            local = {
                k: Tensor(arr if k == _name else v.data) for k, v in tensors.items()
            }
            return float(fn(local).data)

        numeric = numeric_gradient(scalar_fn, t.data, h=h, coords=coords)
        worst = max(worst, relative_error(analytic, numeric))
    return worst
