"""JSONL manifest interchange for scene samples.

One JSON object per line, one line per SceneSample. Masks travel as
base64 RLE payloads, joints and quaternions as flat float arrays.
Field-by-field documentation lives in docs/data_formats.md.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import ManifestError
from .rle import rle_decode, rle_encode
from .types import (
    JOINT_COUNT,
    SEQUENCE_LENGTH,
    AnnotationSet,
    BBox,
    ContextLabel,
    MotionSequence,
    SceneSample,
    SegmentationMaskPair,
)

MANIFEST_VERSION = 1


def _annotations_to_dict(ann: AnnotationSet) -> dict:
    return {
        "motions": list(ann.motions),
        "contexts": [[c.relation, c.class_name] for c in ann.contexts],
        "simple": list(ann.simple),
        "sentences": list(ann.sentences),
    }


def _annotations_from_dict(d: dict) -> AnnotationSet:
    return AnnotationSet(
        motions=tuple(d["motions"]),
        contexts=tuple(ContextLabel(r, c) for r, c in d["contexts"]),
        simple=tuple(d["simple"]),
        sentences=tuple(d["sentences"]),
    )


def _mask_to_dict(mask: np.ndarray, classes: dict) -> dict:
    return {
        "rle": base64.b64encode(rle_encode(mask)).decode("ascii"),
        "classes": {str(k): v for k, v in sorted(classes.items())},
    }


def sample_to_dict(sample: SceneSample) -> dict:
    seq = sample.sequence
    w, h = sample.image_dims
    return {
        "version": MANIFEST_VERSION,
        "id": sample.id,
        "track_id": seq.track_id,
        "frame_rate_hz": seq.frame_rate_hz,
        "image_dims": [w, h],
        "boxes": [[b.x0, b.y0, b.x1, b.y1] for b in seq.boxes],
        "joints": np.asarray(seq.joints).reshape(-1).tolist(),
        "root_orientation": np.asarray(seq.root_orientation).reshape(-1).tolist(),
        "frame_refs": list(sample.frame_refs),
        "masks": {
            "object": _mask_to_dict(sample.masks.object_mask, sample.masks.object_classes),
            "ground": _mask_to_dict(sample.masks.ground_mask, sample.masks.ground_classes),
        },
        "annotations": _annotations_to_dict(sample.annotations) if sample.annotations else None,
        "ground_truth": _annotations_to_dict(sample.ground_truth) if sample.ground_truth else None,
    }


def sample_from_dict(d: dict) -> SceneSample:
    try:
        w, h = d["image_dims"]
        dims = (int(w), int(h))
        joints = np.asarray(d["joints"], dtype=np.float64).reshape(
            SEQUENCE_LENGTH, JOINT_COUNT, 3
        )
        quats = np.asarray(d["root_orientation"], dtype=np.float64).reshape(
            SEQUENCE_LENGTH, 4
        )
        boxes = tuple(BBox(*map(int, b)) for b in d["boxes"])
        seq = MotionSequence(
            track_id=str(d["track_id"]),
            joints=joints,
            root_orientation=quats,
            boxes=boxes,
            frame_rate_hz=int(d["frame_rate_hz"]),
        )
        masks = SegmentationMaskPair(
            object_mask=rle_decode(base64.b64decode(d["masks"]["object"]["rle"]), dims),
            ground_mask=rle_decode(base64.b64decode(d["masks"]["ground"]["rle"]), dims),
            object_classes={int(k): v for k, v in d["masks"]["object"]["classes"].items()},
            ground_classes={int(k): v for k, v in d["masks"]["ground"]["classes"].items()},
        )
        return SceneSample(
            id=str(d["id"]),
            sequence=seq,
            frame_refs=tuple(d["frame_refs"]),
            masks=masks,
            annotations=_annotations_from_dict(d["annotations"]) if d.get("annotations") else None,
            ground_truth=_annotations_from_dict(d["ground_truth"]) if d.get("ground_truth") else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"invalid manifest record: {exc}") from exc


def sample_to_line(sample: SceneSample) -> str:
    return json.dumps(sample_to_dict(sample), sort_keys=True, separators=(",", ":"))


def write_manifest(samples: Iterable[SceneSample], path) -> int:
    """Write samples as JSONL; returns the number of lines written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(sample_to_line(sample))
            fh.write("\n")
            n += 1
    return n


def read_manifest(path) -> Iterator[SceneSample]:
    """Stream samples from a JSONL manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            yield sample_from_dict(record)


def load_manifest(path) -> list[SceneSample]:
    return list(read_manifest(path))


def validate_manifest(path, out_path: Optional[Path] = None) -> int:
    """Validate every line; optionally re-emit a canonical copy."""
    count = 0
    out = open(out_path, "w", encoding="utf-8") if out_path else None
    try:
        for sample in read_manifest(path):
            count += 1
            if out:
                out.write(sample_to_line(sample))
                out.write("\n")
    finally:
        if out:
            out.close()
    return count
