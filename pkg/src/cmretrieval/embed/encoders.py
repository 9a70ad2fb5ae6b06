"""Toy trainable encoders for text, motion, and video.

These stand in for large pretrained backbones so the pipeline is
self-contained; the encoder interface is pluggable, and externally
computed embeddings can be imported instead (see embed.model).
"""

from __future__ import annotations

import re
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config import EmbedSettings
from ..errors import EmptyText, OutOfBounds, ShapeMismatch
from ..types import JOINT_COUNT, SEQUENCE_LENGTH, BBox, MotionSequence
from .autodiff import Tensor, l2_normalize, linear, reshape, tanh, tmean, tsum

_ARTICLES = frozenset({"a", "an", "the"})
_TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9'-]*")

FOCUS_VALUE = 1.0  # "red" marker written into the focus channel
FOCUS_STROKE = 2   # stroke width in pixels


def tokenize(text: str) -> list[str]:
    """Lowercase, drop articles and punctuation, split on whitespace."""
    if not text or not text.strip():
        raise EmptyText("text is empty")
    tokens = [t for t in _TOKEN_RE.findall(text.lower()) if t not in _ARTICLES]
    if not tokens:
        raise EmptyText(f"no tokens left in {text!r} after normalization")
    return tokens


def _fnv1a(token: str) -> int:
    """FNV-1a 32-bit: stable across processes, unlike built-in hash()."""
    acc = 0x811C9DC5
    for byte in token.encode("utf-8"):
        acc = ((acc ^ byte) * 0x01000193) & 0xFFFFFFFF
    return acc


def token_buckets(tokens: Sequence[str], n_buckets: int) -> list[int]:
    return [_fnv1a(t) % n_buckets for t in tokens]


def encode_text(text: str, params: dict, cfg: EmbedSettings) -> Tensor:
    """Hash-bucket bag-of-words -> one hidden tanh layer -> R^D."""
    buckets = token_buckets(tokenize(text), cfg.text_buckets)
    table = params["text.buckets"]
    summed = tsum(table[np.array(buckets)], axis=0)
    hidden = tanh(linear(summed, params["text.w1"], params["text.b1"]))
    return linear(hidden, params["text.w2"], params["text.b2"])


def encode_text_np(text: str, params: dict, cfg: EmbedSettings, normalize: bool = True) -> np.ndarray:
    vec = encode_text(text, params, cfg)
    out = l2_normalize(vec) if normalize else vec
    return np.array(out.data)


def motion_input(seq) -> np.ndarray:
    """Flatten a motion sequence to the encoder's (1440,) input layout."""
    joints = seq.joints if isinstance(seq, MotionSequence) else np.asarray(seq)
    if joints.shape != (SEQUENCE_LENGTH, JOINT_COUNT, 3):
        raise ShapeMismatch(f"expected (20, 24, 3) joints, got {joints.shape}")
    return np.asarray(joints, dtype=np.float64).reshape(-1)


def encode_motion_batch(x: Tensor, params: dict) -> Tensor:
    """(N, 1440) flattened joint sequences -> (N, D)."""
    hidden = tanh(linear(x, params["motion.w1"], params["motion.b1"]))
    return linear(hidden, params["motion.w2"], params["motion.b2"])


def encode_motion(seq, params: dict) -> Tensor:
    """One motion sequence (MotionSequence or (20, 24, 3) array) -> R^D."""
    if isinstance(seq, Tensor):
        if seq.shape != (SEQUENCE_LENGTH, JOINT_COUNT, 3):
            raise ShapeMismatch(f"expected (20, 24, 3) joints, got {seq.shape}")
        x = reshape(seq, (1, -1))
    else:
        x = Tensor(motion_input(seq).reshape(1, -1))
    return reshape(encode_motion_batch(x, params), (-1,))


def draw_focus_box(
    frame: np.ndarray,
    box: Optional[BBox],
    channel: int = -1,
    value: float = FOCUS_VALUE,
) -> np.ndarray:
    """Mark a 2-pixel rectangular outline in one channel of a frame.

    Only the perimeter is written; the interior is untouched, and
    repeated draws of the same box are idempotent. A None box returns
    the input unchanged.
    """
    if box is None:
        return frame
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim != 3:
        raise ShapeMismatch(f"expected (H, W, C) frame, got shape {arr.shape}")
    h, w = arr.shape[:2]
    if box.x0 < 0 or box.y0 < 0 or box.x1 > w or box.y1 > h:
        raise OutOfBounds(f"box {box} outside {w}x{h} frame")
    out = arr.copy()
    s = FOCUS_STROKE
    top = min(box.y0 + s, box.y1)
    bottom = max(box.y1 - s, box.y0)
    left = min(box.x0 + s, box.x1)
    right = max(box.x1 - s, box.x0)
    out[box.y0:top, box.x0:box.x1, channel] = value
    out[bottom:box.y1, box.x0:box.x1, channel] = value
    out[box.y0:box.y1, box.x0:left, channel] = value
    out[box.y0:box.y1, right:box.x1, channel] = value
    return out


def _scale_box(box: BBox, from_dims: Tuple[int, int], to_dims: Tuple[int, int]) -> BBox:
    fw, fh = from_dims
    tw, th = to_dims
    sx, sy = tw / fw, th / fh
    x0 = int(np.floor(box.x0 * sx))
    y0 = int(np.floor(box.y0 * sy))
    x1 = max(int(np.ceil(box.x1 * sx)), x0 + 1)
    y1 = max(int(np.ceil(box.y1 * sy)), y0 + 1)
    return BBox(x0, y0, min(x1, tw), min(y1, th))


def _block_mean(raster: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = raster.shape
    if h % out_h or w % out_w:
        raise ShapeMismatch(f"{h}x{w} raster not divisible into {out_h}x{out_w}")
    fh, fw = h // out_h, w // out_w
    return raster.reshape(out_h, fh, out_w, fw).mean(axis=(1, 3))


def render_scene_frames(sample, cfg: EmbedSettings, with_focus: bool = True) -> np.ndarray:
    """Reduced-resolution (T, vh, vw, 3) rasters for the video encoder.

    Channels: object classes, ground classes (both id-normalized), and
    the focus channel carrying the per-frame person box outline.
    """
    masks = sample.masks
    w, h = masks.image_dims
    obj = masks.object_mask.astype(np.float64) / max(max(masks.object_classes), 1)
    gnd = masks.ground_mask.astype(np.float64) / max(max(masks.ground_classes), 1)
    base = np.zeros((cfg.video_height, cfg.video_width, 3))
    base[:, :, 0] = _block_mean(obj, cfg.video_height, cfg.video_width)
    base[:, :, 1] = _block_mean(gnd, cfg.video_height, cfg.video_width)
    frames = np.repeat(base[None], SEQUENCE_LENGTH, axis=0)
    if with_focus:
        to_dims = (cfg.video_width, cfg.video_height)
        for t, box in enumerate(sample.sequence.boxes):
            frames[t] = draw_focus_box(frames[t], _scale_box(box, (w, h), to_dims), channel=2)
    return frames


def video_feature_dim(cfg: EmbedSettings) -> int:
    gh = cfg.video_height // cfg.video_patch
    gw = cfg.video_width // cfg.video_patch
    return gh * gw * 3


def video_features_np(frames: np.ndarray, cfg: EmbedSettings) -> np.ndarray:
    """Fixed (non-learned) pooling: per-frame patch means, then temporal
    mean, flattened. Plain-numpy twin of the autodiff path below."""
    t, h, w, c = frames.shape
    _check_video_shape(frames, cfg)
    p = cfg.video_patch
    gh, gw = h // p, w // p
    patches = frames.reshape(t, gh, p, gw, p, c).mean(axis=(2, 4))
    return patches.mean(axis=0).reshape(-1)


def video_features_t(frames: Tensor, cfg: EmbedSettings) -> Tensor:
    """Autodiff version of video_features_np, for input-gradient checks."""
    t, h, w, c = frames.shape
    p = cfg.video_patch
    gh, gw = h // p, w // p
    x = reshape(frames, (t, gh, p, gw, p, c))
    x = tmean(tmean(x, axis=4), axis=2)         # (t, gh, gw, c)
    return reshape(tmean(x, axis=0), (-1,))


def _check_video_shape(frames, cfg: EmbedSettings):
    t, h, w, c = frames.shape
    if (t, h, w, c) != (SEQUENCE_LENGTH, cfg.video_height, cfg.video_width, 3):
        raise ShapeMismatch(
            f"expected ({SEQUENCE_LENGTH}, {cfg.video_height}, {cfg.video_width}, 3) "
            f"frames, got {frames.shape}"
        )


def encode_video_batch(feats: Tensor, params: dict) -> Tensor:
    """(N, F) pooled video features -> (N, D)."""
    hidden = tanh(linear(feats, params["video.w1"], params["video.b1"]))
    return linear(hidden, params["video.w2"], params["video.b2"])


def encode_video(frames, params: dict, cfg: EmbedSettings) -> Tensor:
    """20 reduced-resolution focus-channel rasters -> R^D."""
    if isinstance(frames, Tensor):
        _check_video_shape(frames.data, cfg)
        feats = video_features_t(frames, cfg)
    else:
        arr = np.asarray(frames, dtype=np.float64)
        _check_video_shape(arr, cfg)
        feats = Tensor(video_features_np(arr, cfg))
    return reshape(encode_video_batch(reshape(feats, (1, -1)), params), (-1,))
