import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmretrieval.config import EmbedSettings, PipelineConfig, TrainSettings


@pytest.fixture
def toy_config() -> PipelineConfig:
    """Small-dimension config used across training-related tests."""
    return PipelineConfig(
        embed=EmbedSettings(dim=32),
        train=TrainSettings(batch_size=6, lr_start=3e-3, lr_end=3e-4, epochs=50, seed=0),
    )


@pytest.fixture
def tiny_embed_cfg() -> EmbedSettings:
    """Dimensions small enough for exhaustive finite differences."""
    return EmbedSettings(
        dim=8, hidden=6, text_buckets=64, text_bucket_dim=8,
        video_height=16, video_width=16, video_patch=8,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
