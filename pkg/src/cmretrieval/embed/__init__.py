"""Trainable encoders, fusion, losses, training, and gradient checks."""

from .autodiff import Tensor, l2_normalize
from .encoders import (
    draw_focus_box,
    encode_motion,
    encode_text,
    encode_text_np,
    encode_video,
    motion_input,
    render_scene_frames,
    video_feature_dim,
    video_features_np,
)
from .fusion import fuse, fuse_project, fused_dim, project
from .gradcheck import grad_check, numeric_gradient, relative_error
from .losses import loss_cosine, loss_infonce, loss_soft_ce
from .model import RetrievalModel, read_embedding_import
from .params import init_params, load_params, save_params, trainable
from .train import (
    AdamW,
    TrainingBatch,
    TrainResult,
    embed_scene_batch,
    encode_text_targets,
    lr_schedule,
    train,
)

__all__ = [
    "AdamW",
    "RetrievalModel",
    "Tensor",
    "TrainingBatch",
    "TrainResult",
    "draw_focus_box",
    "embed_scene_batch",
    "encode_motion",
    "encode_text",
    "encode_text_np",
    "encode_text_targets",
    "encode_video",
    "fuse",
    "fuse_project",
    "fused_dim",
    "grad_check",
    "init_params",
    "l2_normalize",
    "load_params",
    "loss_cosine",
    "loss_infonce",
    "loss_soft_ce",
    "lr_schedule",
    "motion_input",
    "numeric_gradient",
    "project",
    "read_embedding_import",
    "relative_error",
    "render_scene_frames",
    "save_params",
    "train",
    "trainable",
    "video_feature_dim",
    "video_features_np",
]
