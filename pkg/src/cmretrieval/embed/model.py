"""High-level model wrapper used by the service, CLI, and evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from ..config import EmbedSettings, FusionSettings, PipelineConfig
from ..errors import DimMismatch
from .autodiff import Tensor
from .encoders import (
    encode_text_np,
    motion_input,
    render_scene_frames,
    video_features_np,
)
from .params import init_params, load_params, params_fingerprint, save_params
from .train import embed_scene_batch


@dataclass
class RetrievalModel:
    """Trained parameters plus the configs needed to run them."""

    params: Dict[str, Tensor]
    embed_cfg: EmbedSettings
    fusion_cfg: FusionSettings
    with_focus_box: bool = True

    @property
    def dim(self) -> int:
        return self.embed_cfg.dim

    @property
    def version(self) -> str:
        return f"v1-{params_fingerprint(self.params)}"

    def encode_text(self, text: str) -> np.ndarray:
        """Unit-norm text embedding; the same normalization path is used
        for training annotations and incoming queries."""
        return encode_text_np(text, self.params, self.embed_cfg)

    def scene_features(self, sample) -> Tuple[np.ndarray, np.ndarray]:
        frames = render_scene_frames(sample, self.embed_cfg, with_focus=self.with_focus_box)
        return motion_input(sample.sequence), video_features_np(frames, self.embed_cfg)

    def embed_scenes(self, samples: Iterable) -> np.ndarray:
        """(N, D) l2-normalized fused embeddings, eval mode."""
        feats = [self.scene_features(s) for s in samples]
        if not feats:
            return np.zeros((0, self.dim))
        motion = np.stack([m for m, _ in feats])
        video = np.stack([v for _, v in feats])
        return embed_scene_batch(self.params, motion, video, self.fusion_cfg)

    def embed_imported(self, f_m: np.ndarray, f_v: np.ndarray) -> np.ndarray:
        """Fuse externally computed modality embeddings (import path)."""
        f_m = np.atleast_2d(np.asarray(f_m, dtype=np.float64))
        f_v = np.atleast_2d(np.asarray(f_v, dtype=np.float64))
        if f_m.shape[1] != self.dim or f_v.shape[1] != self.dim:
            raise DimMismatch(f"imported embeddings must be {self.dim}-d")
        from .autodiff import l2_normalize
        from .fusion import fuse, project

        f_z = project(
            fuse(Tensor(f_m), Tensor(f_v), self.params, self.fusion_cfg),
            self.params,
            self.fusion_cfg,
            train=False,
        )
        return np.asarray(l2_normalize(f_z).data)

    def save(self, path) -> None:
        meta = {
            "dim": self.embed_cfg.dim,
            "embed": {
                "text_buckets": self.embed_cfg.text_buckets,
                "text_bucket_dim": self.embed_cfg.text_bucket_dim,
                "hidden": self.embed_cfg.hidden,
                "video_height": self.embed_cfg.video_height,
                "video_width": self.embed_cfg.video_width,
                "video_patch": self.embed_cfg.video_patch,
                "init_seed": self.embed_cfg.init_seed,
                "dim": self.embed_cfg.dim,
            },
            "fusion": {
                "strategy": self.fusion_cfg.strategy,
                "dropout_p": self.fusion_cfg.dropout_p,
                "attention_heads": self.fusion_cfg.attention_heads,
                "projection_hidden": self.fusion_cfg.projection_hidden,
            },
            "with_focus_box": self.with_focus_box,
        }
        save_params(self.params, meta, path)

    @classmethod
    def load(cls, path) -> "RetrievalModel":
        params, meta = load_params(path)
        embed_cfg = EmbedSettings(**meta["embed"])
        fusion_cfg = FusionSettings(**meta["fusion"])
        return cls(
            params=params,
            embed_cfg=embed_cfg,
            fusion_cfg=fusion_cfg,
            with_focus_box=bool(meta.get("with_focus_box", True)),
        )

    @classmethod
    def fresh(cls, config: PipelineConfig, with_focus_box: bool = True) -> "RetrievalModel":
        return cls(
            params=init_params(config.embed, config.fusion),
            embed_cfg=config.embed,
            fusion_cfg=config.fusion,
            with_focus_box=with_focus_box,
        )


def read_embedding_import(path) -> List[dict]:
    """Read the optional JSONL import format: {id, f_m, f_v} per line."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
