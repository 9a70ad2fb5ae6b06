"""Run-length codec for class-id rasters.

Binary layout: a sequence of little-endian (u16 class_id, u32 run_len)
pairs over the row-major flattened raster.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .errors import LengthMismatch

_PAIR_DTYPE = np.dtype([("class_id", "<u2"), ("run_len", "<u4")])

MAX_CLASS_ID = np.iinfo(np.uint16).max
MAX_RUN_LEN = np.iinfo(np.uint32).max


def rle_encode(raster: np.ndarray) -> bytes:
    """Encode a 2D class-id raster to run-length bytes."""
    arr = np.asarray(raster)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"raster must be non-empty 2D, got shape {arr.shape}")
    if arr.min() < 0 or arr.max() > MAX_CLASS_ID:
        raise ValueError("class ids must fit in u16")
    flat = arr.reshape(-1)
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [flat.size]))
    pairs = np.empty(len(starts), dtype=_PAIR_DTYPE)
    pairs["class_id"] = flat[starts]
    pairs["run_len"] = ends - starts
    return pairs.tobytes()


def rle_decode(data: bytes, dims: Tuple[int, int]) -> np.ndarray:
    """Decode run-length bytes back to a (height, width) raster.

    ``dims`` is (width, height) to match image conventions elsewhere.
    """
    w, h = dims
    if len(data) % _PAIR_DTYPE.itemsize != 0:
        raise LengthMismatch(f"RLE payload of {len(data)} bytes is not whole pairs")
    pairs = np.frombuffer(data, dtype=_PAIR_DTYPE)
    total = int(pairs["run_len"].sum())
    if total != w * h:
        raise LengthMismatch(f"run lengths sum to {total}, raster needs {w * h}")
    flat = np.repeat(pairs["class_id"].astype(np.int64), pairs["run_len"])
    return flat.reshape(h, w)
