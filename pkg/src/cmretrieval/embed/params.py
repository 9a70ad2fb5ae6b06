"""Model parameter store: initialization and versioned binary serialization.

File layout: magic "CMRM", u32 version, u32 JSON-config length + bytes,
u32 tensor count, then per tensor a u16 name length, the utf-8 name,
u8 ndim, u32 dims, and the little-endian float32 payload.
"""

from __future__ import annotations

import json
import struct
import zlib
from typing import Dict, Tuple

import numpy as np

from ..config import EmbedSettings, FusionSettings
from ..errors import CorruptFile, VersionMismatch
from .autodiff import Tensor
from .encoders import video_feature_dim
from .fusion import fused_dim

MAGIC = b"CMRM"
FORMAT_VERSION = 1

MOTION_INPUT_DIM = 20 * 24 * 3
FROZEN_PREFIXES = ("text.",)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    scale = np.sqrt(2.0 / (fan_in + fan_out))
    return rng.normal(0.0, scale, size=(fan_in, fan_out))


def init_params(
    embed_cfg: EmbedSettings, fusion_cfg: FusionSettings, seed: int | None = None
) -> Dict[str, Tensor]:
    """Seeded Glorot-normal initialization of every model tensor.

    Text-encoder tensors are created frozen (requires_grad=False); they
    stay bit-identical through training.
    """
    rng = np.random.default_rng(embed_cfg.init_seed if seed is None else seed)
    d = embed_cfg.dim
    hid = embed_cfg.hidden
    bdim = embed_cfg.text_bucket_dim
    vfeat = video_feature_dim(embed_cfg)
    k = fused_dim(d, fusion_cfg)
    ph = fusion_cfg.projection_hidden

    arrays: Dict[str, np.ndarray] = {
        "text.buckets": rng.normal(0.0, 1.0 / np.sqrt(bdim), size=(embed_cfg.text_buckets, bdim)),
        "text.w1": _glorot(rng, bdim, hid),
        "text.b1": np.zeros(hid),
        "text.w2": _glorot(rng, hid, d),
        "text.b2": np.zeros(d),
        "motion.w1": _glorot(rng, MOTION_INPUT_DIM, hid),
        "motion.b1": np.zeros(hid),
        "motion.w2": _glorot(rng, hid, d),
        "motion.b2": np.zeros(d),
        "video.w1": _glorot(rng, vfeat, hid),
        "video.b1": np.zeros(hid),
        "video.w2": _glorot(rng, hid, d),
        "video.b2": np.zeros(d),
        "proj.ln_g": np.ones(k),
        "proj.ln_b": np.zeros(k),
        "proj.w1": _glorot(rng, k, ph),
        "proj.b1": np.zeros(ph),
        "proj.w2": _glorot(rng, ph, d),
        "proj.b2": np.zeros(d),
    }
    if fusion_cfg.strategy == "attention":
        for name in ("fusion.wq", "fusion.wk", "fusion.wv", "fusion.wo"):
            arrays[name] = _glorot(rng, d, d)

    return {
        name: Tensor(arr, requires_grad=not name.startswith(FROZEN_PREFIXES))
        for name, arr in arrays.items()
    }


def trainable(params: Dict[str, Tensor]) -> Dict[str, Tensor]:
    return {k: v for k, v in params.items() if v.requires_grad}


def params_fingerprint(params: Dict[str, Tensor]) -> str:
    crc = 0
    for name in sorted(params):
        crc = zlib.crc32(name.encode(), crc)
        crc = zlib.crc32(params[name].data.astype("<f4").tobytes(), crc)
    return f"{crc:08x}"


def save_params(params: Dict[str, Tensor], meta: dict, path) -> None:
    """Write tensors as little-endian float32 with a JSON meta block."""
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(struct.pack("<I", len(params)))
        for name in sorted(params):
            data = params[name].data
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", data.ndim))
            fh.write(struct.pack(f"<{data.ndim}I", *data.shape))
            fh.write(data.astype("<f4").tobytes())


def _read_exact(fh, n: int) -> bytes:
    chunk = fh.read(n)
    if len(chunk) != n:
        raise CorruptFile(f"model file truncated (wanted {n} bytes, got {len(chunk)})")
    return chunk


def load_params(path) -> Tuple[Dict[str, Tensor], dict]:
    """Read a params file back; tensors come back float32-rounded."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise CorruptFile("bad magic: not a model parameters file")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"model format v{version}, expected v{FORMAT_VERSION}")
        (meta_len,) = struct.unpack("<I", _read_exact(fh, 4))
        meta = json.loads(_read_exact(fh, meta_len).decode("utf-8"))
        (count,) = struct.unpack("<I", _read_exact(fh, 4))
        params: Dict[str, Tensor] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", _read_exact(fh, 2))
            name = _read_exact(fh, name_len).decode("utf-8")
            (ndim,) = struct.unpack("<B", _read_exact(fh, 1))
            shape = struct.unpack(f"<{ndim}I", _read_exact(fh, 4 * ndim))
            size = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(_read_exact(fh, 4 * size), dtype="<f4").reshape(shape)
            params[name] = Tensor(
                data.astype(np.float64),
                requires_grad=not name.startswith(FROZEN_PREFIXES),
            )
    return params, meta
