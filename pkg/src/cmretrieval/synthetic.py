"""Synthetic scene generation with exact ground-truth labels.

Scenes are built constructively: class rectangles are painted inside the
exact rule regions induced by the person box, so the declared relations
hold by construction. Motion comes from parametric families (walk, run,
stand, wave) whose family name is the ground-truth motion word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .compose import SynonymTable, compose_annotation_set
from .context import (
    DEFAULT_GROUND_VOCABULARY,
    DEFAULT_PERSON_CLASSES,
    Region,
    RegionConfig,
    behind_region,
    ground_region,
    side_strips,
)
from .errors import InvalidRecipe
from .types import (
    JOINT_COUNT,
    SEQUENCE_LENGTH,
    AnnotationSet,
    BBox,
    ContextLabel,
    MotionSequence,
    SceneSample,
    SegmentationMaskPair,
    sort_context_labels,
)

OBJECT_CLASSES: Dict[int, str] = {
    0: "void",
    1: "person",
    2: "car",
    3: "bus",
    4: "building",
    5: "police car",
    6: "pavement",
    7: "truck",
    8: "tree",
    9: "bench",
    10: "fire truck",
}
GROUND_CLASSES: Dict[int, str] = {
    0: "void",
    1: "road",
    2: "crosswalk",
    3: "sidewalk",
    4: "driveway",
    5: "terrain",
}
_OBJECT_ID = {name: cid for cid, name in OBJECT_CLASSES.items()}
_GROUND_ID = {name: cid for cid, name in GROUND_CLASSES.items()}

LATERAL_OBJECT_NAMES = (
    "car", "bus", "building", "police car", "truck", "tree", "bench", "fire truck",
)

MOTION_FAMILIES = ("run", "stand", "walk", "wave")
DEFAULT_GROUNDS = ("crosswalk", "road", "sidewalk")

# Rough standing skeleton in meters, body-centric, y up, z forward.
# Rows follow the SMPL joint order of types.JOINT_NAMES.
_BASE_POSE = np.array([
    [0.00, 0.00, 0.00],    # pelvis
    [0.10, -0.05, 0.00],   # left_hip
    [-0.10, -0.05, 0.00],  # right_hip
    [0.00, 0.10, 0.00],    # spine1
    [0.11, -0.50, 0.00],   # left_knee
    [-0.11, -0.50, 0.00],  # right_knee
    [0.00, 0.25, 0.00],    # spine2
    [0.12, -0.90, 0.00],   # left_ankle
    [-0.12, -0.90, 0.00],  # right_ankle
    [0.00, 0.40, 0.00],    # spine3
    [0.12, -0.95, 0.12],   # left_foot
    [-0.12, -0.95, 0.12],  # right_foot
    [0.00, 0.55, 0.00],    # neck
    [0.06, 0.50, 0.00],    # left_collar
    [-0.06, 0.50, 0.00],   # right_collar
    [0.00, 0.70, 0.00],    # head
    [0.20, 0.50, 0.00],    # left_shoulder
    [-0.20, 0.50, 0.00],   # right_shoulder
    [0.24, 0.22, 0.00],    # left_elbow
    [-0.24, 0.22, 0.00],   # right_elbow
    [0.26, -0.02, 0.00],   # left_wrist
    [-0.26, -0.02, 0.00],  # right_wrist
    [0.27, -0.10, 0.00],   # left_hand
    [-0.27, -0.10, 0.00],  # right_hand
])

_LEFT_LEG = [1, 4, 7, 10]
_RIGHT_LEG = [2, 5, 8, 11]
_LEFT_ARM = [16, 18, 20, 22]
_RIGHT_ARM = [17, 19, 21, 23]

_NOISE_STD = 0.008


def _swing_gait(
    rng: np.random.Generator, freq: float, leg_amp: float, arm_amp: float, bob: float
) -> np.ndarray:
    t = np.arange(SEQUENCE_LENGTH) / 10.0
    phase = rng.uniform(0.0, 0.5)
    freq = freq * rng.uniform(0.95, 1.05)
    swing = np.sin(2.0 * np.pi * freq * t + phase)
    joints = np.tile(_BASE_POSE, (SEQUENCE_LENGTH, 1, 1))
    joints[:, _LEFT_LEG, 2] += leg_amp * swing[:, None]
    joints[:, _RIGHT_LEG, 2] -= leg_amp * swing[:, None]
    joints[:, _LEFT_ARM, 2] -= arm_amp * swing[:, None]
    joints[:, _RIGHT_ARM, 2] += arm_amp * swing[:, None]
    joints[:, :, 1] += bob * np.abs(swing)[:, None]
    return joints


def _family_walk(rng: np.random.Generator) -> np.ndarray:
    return _swing_gait(rng, freq=1.0, leg_amp=0.22, arm_amp=0.10, bob=0.02)


def _family_run(rng: np.random.Generator) -> np.ndarray:
    joints = _swing_gait(rng, freq=2.2, leg_amp=0.42, arm_amp=0.28, bob=0.05)
    joints[:, [18, 19], 1] += 0.10  # bent elbows
    return joints


def _family_stand(rng: np.random.Generator) -> np.ndarray:
    t = np.arange(SEQUENCE_LENGTH) / 10.0
    phase = rng.uniform(0.0, 0.5)
    sway = 0.006 * np.sin(2.0 * np.pi * 0.4 * t + phase)
    joints = np.tile(_BASE_POSE, (SEQUENCE_LENGTH, 1, 1))
    joints[:, :, 0] += sway[:, None]
    return joints


def _family_wave(rng: np.random.Generator) -> np.ndarray:
    t = np.arange(SEQUENCE_LENGTH) / 10.0
    phase = rng.uniform(0.0, 0.5)
    joints = np.tile(_BASE_POSE, (SEQUENCE_LENGTH, 1, 1))
    # Right arm raised overhead, hand oscillating laterally.
    joints[:, 19, :] = [-0.26, 0.62, 0.05]
    joints[:, 21, :] = [-0.24, 0.85, 0.05]
    joints[:, 23, :] = [-0.23, 0.93, 0.05]
    osc = 0.14 * np.sin(2.0 * np.pi * 1.5 * t + phase)
    joints[:, [21, 23], 0] += osc[:, None]
    return joints


FAMILY_SAMPLERS = {
    "run": _family_run,
    "stand": _family_stand,
    "walk": _family_walk,
    "wave": _family_wave,
}


def sample_family_joints(family: str, rng: np.random.Generator, noise: float = _NOISE_STD) -> np.ndarray:
    """Draw one noisy (20, 24, 3) joint sequence from a motion family."""
    if family not in FAMILY_SAMPLERS:
        raise InvalidRecipe(f"unknown motion family {family!r}")
    joints = FAMILY_SAMPLERS[family](rng)
    if noise > 0.0:
        joints = joints + rng.normal(0.0, noise, size=joints.shape)
    return joints


def _sample_root_orientation(rng: np.random.Generator) -> np.ndarray:
    t = np.arange(SEQUENCE_LENGTH) / 10.0
    yaw = 0.05 * np.sin(2.0 * np.pi * 0.3 * t + rng.uniform(0.0, 1.0))
    yaw = yaw + rng.normal(0.0, 0.005, size=yaw.shape)
    quats = np.stack(
        [np.cos(yaw / 2.0), np.zeros_like(yaw), np.sin(yaw / 2.0), np.zeros_like(yaw)],
        axis=1,
    )
    return quats / np.linalg.norm(quats, axis=1, keepdims=True)


@dataclass(frozen=True)
class DistractorSpec:
    box: BBox
    ground: str


@dataclass(frozen=True)
class SceneRecipe:
    """Declarative scene description; regions derive from the person box."""

    person_box: BBox
    motion_family: str
    image_dims: Tuple[int, int] = (192, 160)
    ground: Optional[str] = "sidewalk"        # ground-vocabulary class
    ground_fallback: Optional[str] = None     # object class under feet instead
    laterals: Tuple[Tuple[str, str], ...] = ()  # (side: left|right|both, class)
    behinds: Tuple[str, ...] = ()
    distractor: Optional[DistractorSpec] = None
    clutter: int = 0

    def declared_contexts(self) -> Tuple[ContextLabel, ...]:
        labels = []
        if self.ground is not None:
            labels.append(ContextLabel("on", self.ground))
        elif self.ground_fallback is not None:
            labels.append(ContextLabel("on", self.ground_fallback))
        for side, cls in self.laterals:
            relation = "in_front_of" if side == "both" else "next_to"
            labels.append(ContextLabel(relation, cls))
        for cls in self.behinds:
            labels.append(ContextLabel("behind", cls))
        return sort_context_labels(labels)


def _paint(mask: np.ndarray, region: Region, class_id: int):
    if region.is_empty:
        raise InvalidRecipe("declared relation region is empty after clipping")
    mask[region.y0 : region.y1, region.x0 : region.x1] = class_id


def _box_region(box: BBox, dims: Tuple[int, int]) -> Region:
    clipped = box.clipped(dims)
    return Region(clipped.x0, clipped.y0, clipped.x1, clipped.y1)


def _ground_band(box: BBox, dims: Tuple[int, int], margin: int = 6) -> Region:
    """Generous band around the feet, wider and deeper than the rule
    region so the declared class is the unambiguous majority."""
    w, h = dims
    depth = max(2, int(round(0.25 * box.height)))
    return Region(
        max(box.x0 - margin, 0),
        max(box.y1 - depth, 0),
        min(box.x1 + margin, w),
        min(box.y1 + depth // 2, h),
    )


def generate_synthetic_scene(
    recipe: SceneRecipe,
    seed: int,
    region_cfg: RegionConfig = RegionConfig(),
) -> Tuple[SceneSample, AnnotationSet]:
    """Build one scene plus its ground-truth annotations.

    The same (recipe, seed) pair always produces byte-identical samples.
    """
    rng = np.random.default_rng(seed)
    w, h = recipe.image_dims
    box = recipe.person_box
    if box.x1 > w or box.y1 > h:
        raise InvalidRecipe(f"person box {box} exceeds image {recipe.image_dims}")
    if recipe.motion_family not in FAMILY_SAMPLERS:
        raise InvalidRecipe(f"unknown motion family {recipe.motion_family!r}")
    if recipe.ground is not None and recipe.ground not in _GROUND_ID:
        raise InvalidRecipe(f"unknown ground class {recipe.ground!r}")

    object_mask = np.zeros((h, w), dtype=np.int64)
    ground_mask = np.zeros((h, w), dtype=np.int64)

    # Clutter must stay clear of every rule region of the subject box,
    # painted or not, or it would add labels the recipe never declared.
    strips = side_strips(box, recipe.image_dims, region_cfg)
    occupied = [
        _box_region(box, recipe.image_dims),
        behind_region(box, recipe.image_dims, region_cfg),
        ground_region(box, recipe.image_dims, region_cfg),
        *strips,
    ]

    _paint(object_mask, _box_region(box, recipe.image_dims), _OBJECT_ID["person"])

    if recipe.ground is not None:
        band = _ground_band(box, recipe.image_dims)
        _paint(ground_mask, band, _GROUND_ID[recipe.ground])
        occupied.append(band)
    elif recipe.ground_fallback is not None:
        if recipe.ground_fallback not in _OBJECT_ID:
            raise InvalidRecipe(f"unknown object class {recipe.ground_fallback!r}")
        region = ground_region(box, recipe.image_dims, region_cfg)
        _paint(object_mask, region, _OBJECT_ID[recipe.ground_fallback])

    # Classes sharing a strip are painted into disjoint row partitions so
    # none erases another; same for behind classes and column partitions.
    left, right = strips
    per_strip = {"left": [], "right": []}
    for side, cls in recipe.laterals:
        if cls not in _OBJECT_ID:
            raise InvalidRecipe(f"unknown object class {cls!r}")
        if side == "both":
            per_strip["left"].append(cls)
            per_strip["right"].append(cls)
        elif side in per_strip:
            per_strip[side].append(cls)
        else:
            raise InvalidRecipe(f"unknown side {side!r}")
    for strip, classes in ((left, per_strip["left"]), (right, per_strip["right"])):
        for k, cls in enumerate(classes):
            n = len(classes)
            y0 = strip.y0 + k * (strip.y1 - strip.y0) // n
            y1 = strip.y0 + (k + 1) * (strip.y1 - strip.y0) // n
            part = Region(strip.x0, y0, strip.x1, y1)
            _paint(object_mask, part, _OBJECT_ID[cls])

    band = behind_region(box, recipe.image_dims, region_cfg)
    for k, cls in enumerate(recipe.behinds):
        if cls not in _OBJECT_ID:
            raise InvalidRecipe(f"unknown object class {cls!r}")
        n = len(recipe.behinds)
        x0 = band.x0 + k * (band.x1 - band.x0) // n
        x1 = band.x0 + (k + 1) * (band.x1 - band.x0) // n
        _paint(object_mask, Region(x0, band.y0, x1, band.y1), _OBJECT_ID[cls])

    if recipe.distractor is not None:
        dbox = recipe.distractor.box
        if dbox.x1 > w or dbox.y1 > h:
            raise InvalidRecipe("distractor box exceeds image bounds")
        dregion = _box_region(dbox, recipe.image_dims)
        dband = _ground_band(dbox, recipe.image_dims)
        _paint(object_mask, dregion, _OBJECT_ID["person"])
        _paint(ground_mask, dband, _GROUND_ID[recipe.distractor.ground])
        occupied.extend([dregion, dband])

    for _ in range(recipe.clutter):
        for _attempt in range(20):
            cw = int(rng.integers(6, 20))
            ch = int(rng.integers(6, 20))
            cx = int(rng.integers(0, max(w - cw, 1)))
            cy = int(rng.integers(0, max(h - ch, 1)))
            rect = Region(cx, cy, cx + cw, cy + ch)
            pad = 2
            if any(
                not (
                    rect.x1 + pad <= r.x0 or r.x1 + pad <= rect.x0
                    or rect.y1 + pad <= r.y0 or r.y1 + pad <= rect.y0
                )
                for r in occupied
            ):
                continue
            cls = str(rng.choice(LATERAL_OBJECT_NAMES))
            _paint(object_mask, rect, _OBJECT_ID[cls])
            break

    joints = sample_family_joints(recipe.motion_family, rng)
    quats = _sample_root_orientation(rng)
    boxes = tuple(box for _ in range(SEQUENCE_LENGTH))

    masks = SegmentationMaskPair(
        object_mask=object_mask,
        ground_mask=ground_mask,
        object_classes=OBJECT_CLASSES,
        ground_classes=GROUND_CLASSES,
    )
    sequence = MotionSequence(
        track_id=f"synthetic-{seed}",
        joints=joints,
        root_orientation=quats,
        boxes=boxes,
    )
    truth = compose_annotation_set(
        motions=[recipe.motion_family],
        contexts=list(recipe.declared_contexts()),
        syn=SynonymTable(),
    )
    sample = SceneSample(
        id=f"scene-{seed:08d}",
        sequence=sequence,
        frame_refs=tuple(
            f"synthetic://scene-{seed:08d}/frame-{i:02d}" for i in range(SEQUENCE_LENGTH)
        ),
        masks=masks,
        ground_truth=truth,
    )
    return sample, truth


def random_person_box(
    rng: np.random.Generator, image_dims: Tuple[int, int], cfg: RegionConfig = RegionConfig()
) -> BBox:
    w, h = image_dims
    bw = int(rng.integers(40, 57))
    bh = int(rng.integers(92, 117))
    margin_x = int(np.ceil(cfg.lateral_out * bw)) + 2
    margin_y = int(np.ceil(cfg.behind_depth * bh)) + 2
    x0 = int(rng.integers(margin_x, w - bw - margin_x))
    y0 = int(rng.integers(2, h - bh - margin_y))
    return BBox(x0, y0, x0 + bw, y0 + bh)


def random_recipe(
    rng: np.random.Generator,
    image_dims: Tuple[int, int] = (192, 160),
    families: Sequence[str] = MOTION_FAMILIES,
    grounds: Sequence[str] = DEFAULT_GROUNDS,
    clutter: int = 2,
) -> SceneRecipe:
    """Sample a recipe exercising a random mix of relations."""
    box = random_person_box(rng, image_dims)
    family = str(rng.choice(list(families)))

    ground = None
    ground_fallback = None
    roll = rng.random()
    if roll < 0.80:
        ground = str(rng.choice(list(grounds)))
    elif roll < 0.90:
        ground_fallback = "pavement"
    # else: no "on" label at all

    pool = list(LATERAL_OBJECT_NAMES)
    rng.shuffle(pool)
    laterals = []
    n_lateral = int(rng.integers(0, 3))
    for _ in range(n_lateral):
        side = str(rng.choice(["left", "right", "both"]))
        laterals.append((side, pool.pop()))
    behinds = []
    if rng.random() < 0.5:
        behinds.append(pool.pop())

    return SceneRecipe(
        person_box=box,
        motion_family=family,
        image_dims=image_dims,
        ground=ground,
        ground_fallback=ground_fallback,
        laterals=tuple(laterals),
        behinds=tuple(behinds),
        clutter=clutter,
    )


def generate_dataset(
    n: int,
    seed: int,
    image_dims: Tuple[int, int] = (192, 160),
    families: Sequence[str] = MOTION_FAMILIES,
    grounds: Sequence[str] = DEFAULT_GROUNDS,
    with_distractors: bool = False,
    clutter: int = 0,
) -> list[SceneSample]:
    """Generate a balanced labeled dataset of synthetic scenes.

    Scenes cycle through family x ground combinations so every simple
    label is equally represented. With ``with_distractors`` a second
    person with a different ground class appears in each frame, and the
    subject/distractor positions swap at random.
    """
    rng = np.random.default_rng(seed)
    samples = []
    combos = [(f, g) for f in families for g in grounds]
    for i in range(n):
        family, ground = combos[i % len(combos)]
        scene_seed = int(rng.integers(0, 2**31 - 1))
        scene_rng = np.random.default_rng(scene_seed)
        w, h = image_dims
        if with_distractors:
            # Two persons in disjoint halves; the subject side is random.
            half = w // 2
            left_box = random_person_box(scene_rng, (half - 8, h))
            right_shift = half + 8
            rb = random_person_box(scene_rng, (half - 8, h))
            right_box = BBox(rb.x0 + right_shift, rb.y0, rb.x1 + right_shift, rb.y1)
            subject_left = bool(scene_rng.random() < 0.5)
            subject_box = left_box if subject_left else right_box
            other_box = right_box if subject_left else left_box
            other_ground = str(scene_rng.choice([g for g in grounds if g != ground]))
            recipe = SceneRecipe(
                person_box=subject_box,
                motion_family=family,
                image_dims=image_dims,
                ground=ground,
                distractor=DistractorSpec(box=other_box, ground=other_ground),
                clutter=clutter,
            )
        else:
            recipe = SceneRecipe(
                person_box=random_person_box(scene_rng, image_dims),
                motion_family=family,
                image_dims=image_dims,
                ground=ground,
                clutter=clutter,
            )
        sample, truth = generate_synthetic_scene(recipe, scene_seed)
        sample = SceneSample(
            id=f"scene-{i:05d}",
            sequence=sample.sequence,
            frame_refs=sample.frame_refs,
            masks=sample.masks,
            annotations=truth,
            ground_truth=truth,
        )
        samples.append(sample)
    return samples
