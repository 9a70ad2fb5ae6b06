"""Core domain types for tracks, masks, labels, and scenes.

All types are immutable after construction (frozen dataclasses; numpy
arrays are marked read-only), so instances can be shared across threads
without locks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

SEQUENCE_LENGTH = 20
FRAME_RATE_HZ = 10
JOINT_COUNT = 24

# SMPL body-joint ordering, root (pelvis) first. See docs/data_formats.md.
JOINT_NAMES = (
    "pelvis", "left_hip", "right_hip", "spine1", "left_knee", "right_knee",
    "spine2", "left_ankle", "right_ankle", "spine3", "left_foot", "right_foot",
    "neck", "left_collar", "right_collar", "head", "left_shoulder",
    "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist",
    "left_hand", "right_hand",
)

RELATIONS = ("on", "behind", "in_front_of", "next_to")
# Deterministic emission order for composed label lists.
RELATION_ORDER = {rel: i for i, rel in enumerate(RELATIONS)}

QUAT_NORM_TOL = 1e-6


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in pixel coordinates, [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if min(self.x0, self.y0, self.x1, self.y1) < 0:
            raise ValueError(f"negative coordinate in {self}")
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def clipped(self, image_dims: Tuple[int, int]) -> "BBox":
        """Clip to image bounds; raises ValueError if nothing remains."""
        w, h = image_dims
        return BBox(
            max(self.x0, 0), max(self.y0, 0), min(self.x1, w), min(self.y1, h)
        )


@dataclass(frozen=True)
class Frame:
    """One video frame with the boxes of every tracked person in it."""

    frame_index: int
    image_dims: Tuple[int, int]
    person_boxes: Mapping[str, Optional[BBox]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "person_boxes", dict(self.person_boxes))


@dataclass(frozen=True)
class TrackObservation:
    """Raw per-frame observation of a single tracked person.

    ``box`` is None for a missing detection; ``joints``/``root_quat`` are
    None when no pose was estimated for the frame.
    """

    frame_index: int
    box: Optional[BBox] = None
    joints: Optional[np.ndarray] = None      # (24, 3) meters, body-centric
    root_quat: Optional[np.ndarray] = None   # (4,) unit quaternion, w first

    def __post_init__(self):
        if self.joints is not None:
            j = np.asarray(self.joints, dtype=np.float64)
            if j.shape != (JOINT_COUNT, 3):
                raise ValueError(f"joints shape {j.shape}, expected (24, 3)")
            object.__setattr__(self, "joints", _freeze(j))
        if self.root_quat is not None:
            q = np.asarray(self.root_quat, dtype=np.float64)
            if q.shape != (4,):
                raise ValueError(f"root_quat shape {q.shape}, expected (4,)")
            object.__setattr__(self, "root_quat", _freeze(q))


def track_from_frames(frames: Sequence[Frame], track_id: str) -> list[TrackObservation]:
    """View one track's boxes out of multi-person frames, time-ordered."""
    obs = [
        TrackObservation(frame_index=f.frame_index, box=f.person_boxes.get(track_id))
        for f in frames
    ]
    if any(prev.frame_index >= cur.frame_index for prev, cur in zip(obs, obs[1:])):
        raise ValueError("frames are not time-ordered")
    return obs


@dataclass(frozen=True)
class MotionSequence:
    """A valid 2-second motion segment: 20 frames of pose and boxes."""

    track_id: str
    joints: np.ndarray            # (20, 24, 3)
    root_orientation: np.ndarray  # (20, 4) unit quaternions, w first
    boxes: Tuple[BBox, ...]       # 20 entries
    frame_rate_hz: int = FRAME_RATE_HZ

    def __post_init__(self):
        j = np.asarray(self.joints, dtype=np.float64)
        q = np.asarray(self.root_orientation, dtype=np.float64)
        if j.shape != (SEQUENCE_LENGTH, JOINT_COUNT, 3):
            raise ValueError(f"joints shape {j.shape}, expected (20, 24, 3)")
        if q.shape != (SEQUENCE_LENGTH, 4):
            raise ValueError(f"root_orientation shape {q.shape}, expected (20, 4)")
        norms = np.linalg.norm(q, axis=1)
        if np.any(np.abs(norms - 1.0) > QUAT_NORM_TOL):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValueError(f"root orientation not unit-norm (max dev {worst:.2e})")
        if len(self.boxes) != SEQUENCE_LENGTH:
            raise ValueError(f"{len(self.boxes)} boxes, expected 20")
        object.__setattr__(self, "joints", _freeze(j))
        object.__setattr__(self, "root_orientation", _freeze(q))
        object.__setattr__(self, "boxes", tuple(self.boxes))


@dataclass(frozen=True)
class SegmentationMaskPair:
    """Per-pixel class id rasters for one frame, in two vocabularies."""

    object_mask: np.ndarray   # (H, W) int class ids
    ground_mask: np.ndarray   # (H, W) int class ids
    object_classes: Mapping[int, str]
    ground_classes: Mapping[int, str]

    def __post_init__(self):
        om = np.asarray(self.object_mask)
        gm = np.asarray(self.ground_mask)
        if om.ndim != 2 or om.shape != gm.shape:
            raise ValueError(f"mask shapes differ: {om.shape} vs {gm.shape}")
        for mask, table, name in (
            (om, self.object_classes, "object"),
            (gm, self.ground_classes, "ground"),
        ):
            missing = set(np.unique(mask).tolist()) - set(table)
            if missing:
                raise ValueError(f"{name} mask ids {sorted(missing)} absent from class table")
        object.__setattr__(self, "object_mask", _freeze(om))
        object.__setattr__(self, "ground_mask", _freeze(gm))
        object.__setattr__(self, "object_classes", dict(self.object_classes))
        object.__setattr__(self, "ground_classes", dict(self.ground_classes))

    @property
    def image_dims(self) -> Tuple[int, int]:
        h, w = self.object_mask.shape
        return (w, h)


@dataclass(frozen=True, order=True)
class ContextLabel:
    """A spatial relation between the person and a scene class."""

    relation: str
    class_name: str

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")


def sort_context_labels(labels) -> Tuple[ContextLabel, ...]:
    """Relation order on/behind/in_front_of/next_to, classes lexicographic."""
    return tuple(sorted(labels, key=lambda c: (RELATION_ORDER[c.relation], c.class_name)))


@dataclass(frozen=True)
class AnnotationSet:
    """Motion words, context labels, and the composed strings for one person."""

    motions: Tuple[str, ...]             # rank order, top-1 first
    contexts: Tuple[ContextLabel, ...]
    simple: Tuple[str, ...]              # "{motion} {context-class}"
    sentences: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "motions", tuple(self.motions))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "simple", tuple(self.simple))
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.simple:
            n_motion = len(dict.fromkeys(self.motions))
            n_class = len(dict.fromkeys(c.class_name for c in self.contexts))
            if len(self.simple) != n_motion * n_class:
                raise ValueError(
                    f"{len(self.simple)} simple labels, expected "
                    f"{n_motion} x {n_class}"
                )


@dataclass(frozen=True)
class SceneSample:
    """The unit of retrieval: one person's motion segment plus its scene."""

    id: str
    sequence: MotionSequence
    frame_refs: Tuple[str, ...]
    masks: SegmentationMaskPair        # middle frame of the sequence
    annotations: Optional[AnnotationSet] = None
    ground_truth: Optional[AnnotationSet] = None  # synthetic scenes only

    def __post_init__(self):
        object.__setattr__(self, "frame_refs", tuple(self.frame_refs))

    @property
    def image_dims(self) -> Tuple[int, int]:
        return self.masks.image_dims
