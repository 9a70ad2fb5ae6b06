"""End-to-end glue: annotate manifests, prepare training data, train,
embed, and index. The CLI and service are thin shells over this module."""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .compose import compose_annotation_set
from .config import PipelineConfig
from .context import label_context
from .embed.encoders import motion_input, render_scene_frames, video_features_np
from .embed.model import RetrievalModel
from .embed.train import TrainingBatch, TrainResult, train
from .errors import EmptyInput
from .index import VectorIndex
from .motion import (
    MotionVocabulary,
    build_prototype_vocabulary,
    embed_for_vocabulary,
    label_motion,
)
from .synthetic import FAMILY_SAMPLERS, sample_family_joints
from .types import SceneSample


def motion_vocabulary(config: PipelineConfig, model: RetrievalModel) -> MotionVocabulary:
    """Prototype vocabulary over the synthetic motion families.

    Centroids come from the (possibly untrained) motion encoder, so the
    motion pipeline is usable before any training happened.
    """
    from .embed.encoders import encode_motion

    samplers = {
        name: (lambda rng, _name=name: sample_family_joints(_name, rng))
        for name in FAMILY_SAMPLERS
    }
    return build_prototype_vocabulary(
        encode=lambda joints: encode_motion(joints, model.params).data,
        family_samplers=samplers,
        samples_per_family=config.vocab.prototypes_per_family,
        seed=config.vocab.seed,
        threshold=config.vocab.threshold,
        excluded_words=frozenset(config.vocab.excluded_words),
    )


def annotate_sample(
    sample: SceneSample,
    config: PipelineConfig,
    model: RetrievalModel,
    vocab: MotionVocabulary,
) -> SceneSample:
    """Run the motion and context labelers and compose annotations."""
    from .embed.encoders import encode_motion

    embedding = embed_for_vocabulary(
        lambda joints: encode_motion(joints, model.params).data,
        sample.sequence.joints,
        vocab,
    )
    motions = label_motion(embedding, vocab)
    middle_box = sample.sequence.boxes[len(sample.sequence.boxes) // 2]
    contexts = label_context(
        middle_box.clipped(sample.image_dims),
        sample.masks,
        config.regions,
        config.ground_vocab,
        config.person_classes,
    )
    if not contexts:
        raise EmptyInput(f"scene {sample.id} has no context labels")
    annotations = compose_annotation_set(motions, list(contexts), config.synonyms)
    return replace(sample, annotations=annotations)


def annotate_samples(
    samples: Iterable[SceneSample], config: PipelineConfig, model: Optional[RetrievalModel] = None
) -> List[SceneSample]:
    model = model or RetrievalModel.fresh(config)
    vocab = motion_vocabulary(config, model)
    return [annotate_sample(s, config, model, vocab) for s in samples]


def first_annotation(sample: SceneSample) -> str:
    """Training target: the first simple "{motion} {context}" label."""
    ann = sample.annotations
    if ann is None or not ann.simple:
        raise EmptyInput(f"scene {sample.id} is not annotated")
    return ann.simple[0]


def prepare_training_batch(
    samples: Sequence[SceneSample], model: RetrievalModel
) -> TrainingBatch:
    """Precompute encoder inputs; the pooled video features and text
    targets are constant during training, so they are cached up front."""
    motion = np.stack([motion_input(s.sequence) for s in samples])
    video = np.stack(
        [
            video_features_np(
                render_scene_frames(s, model.embed_cfg, with_focus=model.with_focus_box),
                model.embed_cfg,
            )
            for s in samples
        ]
    )
    texts = [first_annotation(s) for s in samples]
    ids = [s.id for s in samples]
    return TrainingBatch(motion=motion, video=video, texts=texts, ids=ids)


def train_model(
    samples: Sequence[SceneSample],
    config: PipelineConfig,
    with_focus_box: bool = True,
) -> Tuple[RetrievalModel, TrainResult]:
    model = RetrievalModel.fresh(config, with_focus_box=with_focus_box)
    batch = prepare_training_batch(samples, model)
    result = train(
        batch, model.params, config.fusion, config.loss, config.train, config.embed
    )
    return model, result


def scene_metadata(sample: SceneSample) -> dict:
    ann = sample.annotations
    return {
        "id": sample.id,
        "track_id": sample.sequence.track_id,
        "frame_refs": list(sample.frame_refs),
        "annotations": {
            "motions": list(ann.motions),
            "contexts": [[c.relation, c.class_name] for c in ann.contexts],
            "simple": list(ann.simple),
            "sentences": list(ann.sentences),
        }
        if ann
        else None,
    }


def build_index(
    samples: Sequence[SceneSample], model: RetrievalModel
) -> VectorIndex:
    index = VectorIndex(model.dim)
    if not samples:
        return index
    vectors = model.embed_scenes(samples)
    for sample, vec in zip(samples, vectors):
        index.insert(sample.id, vec, scene_metadata(sample))
    return index


def candidate_labels(samples: Sequence[SceneSample]) -> List[str]:
    """Distinct first annotations, in first-seen order."""
    return list(dict.fromkeys(first_annotation(s) for s in samples))
