"""Context-motion scene retrieval.

Auto-labels person tracks with motion and scene-context annotations from
geometric rules over segmentation masks, trains a fused motion+video
embedding aligned to text, and serves ranked natural-language retrieval
from a persistent vector index.
"""

from .compose import (
    PERSON_SYNONYMS,
    SynonymTable,
    annotation_counts,
    compose_annotation_set,
    compose_sentences,
    compose_simple,
)
from .config import PipelineConfig, load_config
from .context import (
    DEFAULT_GROUND_VOCABULARY,
    RegionConfig,
    label_behind,
    label_context,
    label_ground,
    label_lateral,
    side_strips,
)
from .evaluate import EvalReport, recall_at_k, topk_label_accuracy
from .index import VectorIndex
from .lowess import LowessConfig, lowess_smooth
from .manifest import load_manifest, read_manifest, write_manifest
from .motion import (
    MotionVocabulary,
    Segment,
    ValidityConfig,
    extract_valid_segments,
    fill_gaps,
    label_motion,
    smooth_root_orientation,
)
from .rle import rle_decode, rle_encode
from .synthetic import SceneRecipe, generate_dataset, generate_synthetic_scene
from .types import (
    AnnotationSet,
    BBox,
    ContextLabel,
    Frame,
    MotionSequence,
    SceneSample,
    SegmentationMaskPair,
    TrackObservation,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationSet",
    "BBox",
    "ContextLabel",
    "DEFAULT_GROUND_VOCABULARY",
    "EvalReport",
    "Frame",
    "LowessConfig",
    "MotionSequence",
    "MotionVocabulary",
    "PERSON_SYNONYMS",
    "PipelineConfig",
    "RegionConfig",
    "SceneRecipe",
    "SceneSample",
    "Segment",
    "SegmentationMaskPair",
    "SynonymTable",
    "TrackObservation",
    "ValidityConfig",
    "VectorIndex",
    "annotation_counts",
    "compose_annotation_set",
    "compose_sentences",
    "compose_simple",
    "extract_valid_segments",
    "fill_gaps",
    "generate_dataset",
    "generate_synthetic_scene",
    "label_behind",
    "label_context",
    "label_ground",
    "label_lateral",
    "label_motion",
    "load_config",
    "load_manifest",
    "lowess_smooth",
    "read_manifest",
    "recall_at_k",
    "rle_decode",
    "rle_encode",
    "side_strips",
    "smooth_root_orientation",
    "topk_label_accuracy",
    "write_manifest",
]
