"""Spatial-relational and ground-level context labeling.

A person's bounding box induces four pixel regions: two lateral strips
(5% inside / 5% outside the box horizontally, 25%-75% of its height), a
band extending 10% of the box height below it, and the bottom 5% of the
box itself. Object classes found in the strips map to next_to (one side)
or in_front_of (both sides); classes in the lower band map to behind;
the majority ground class under the feet yields a single "on" label.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, floor
from typing import FrozenSet, Tuple

import numpy as np

from .errors import NoGroundClass
from .types import BBox, ContextLabel, SegmentationMaskPair, sort_context_labels


@dataclass(frozen=True)
class RegionConfig:
    lateral_in: float = 0.05
    lateral_out: float = 0.05
    lateral_v_lo: float = 0.25
    lateral_v_hi: float = 0.75
    behind_depth: float = 0.10
    ground_depth: float = 0.05
    min_class_frac: float = 0.02
    min_class_px: int = 10

    def __post_init__(self):
        fracs = (
            self.lateral_in, self.lateral_out, self.lateral_v_lo,
            self.lateral_v_hi, self.behind_depth, self.ground_depth,
            self.min_class_frac,
        )
        if not all(0.0 < f < 1.0 for f in fracs):
            raise ValueError("region fractions must lie in (0, 1)")
        if self.lateral_v_lo >= self.lateral_v_hi:
            raise ValueError("lateral_v_lo must be below lateral_v_hi")
        if self.min_class_px <= 0:
            raise ValueError("min_class_px must be positive")


DEFAULT_GROUND_VOCABULARY = frozenset(
    {"road", "crosswalk", "sidewalk", "driveway", "pavement", "terrain"}
)
DEFAULT_PERSON_CLASSES = frozenset({"person", "pedestrian", "rider", "cyclist"})
VOID_CLASS_NAMES = frozenset({"void", "unlabeled", "background"})


@dataclass(frozen=True)
class Region:
    """Half-open pixel span [x0, x1) x [y0, y1); may be empty."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def is_empty(self) -> bool:
        return self.x1 <= self.x0 or self.y1 <= self.y0

    @property
    def area(self) -> int:
        return 0 if self.is_empty else (self.x1 - self.x0) * (self.y1 - self.y0)


def _pixel_span(lo: float, hi: float, clip_hi: int) -> Tuple[int, int]:
    # Pixels fully covered by the continuous interval [lo, hi), clipped to
    # the image. A sub-pixel interval therefore yields an empty span.
    lo = max(lo, 0.0)
    hi = min(hi, float(clip_hi))
    return int(ceil(lo)), int(floor(hi))


def _make_region(
    x_lo: float, x_hi: float, y_lo: float, y_hi: float, dims: Tuple[int, int]
) -> Region:
    w, h = dims
    x0, x1 = _pixel_span(x_lo, x_hi, w)
    y0, y1 = _pixel_span(y_lo, y_hi, h)
    return Region(x0, y0, x1, y1)


def side_strips(
    box: BBox, dims: Tuple[int, int], cfg: RegionConfig = RegionConfig()
) -> Tuple[Region, Region]:
    """Left and right lateral strips beside a person box.

    Strips reach ``lateral_in`` of the box width inside and
    ``lateral_out`` outside each vertical edge, between ``lateral_v_lo``
    and ``lateral_v_hi`` of the box height. Clipping may leave a strip
    empty, in which case it simply contains no classes.
    """
    w = float(box.width)
    h = float(box.height)
    y_lo = box.y0 + cfg.lateral_v_lo * h
    y_hi = box.y0 + cfg.lateral_v_hi * h
    left = _make_region(box.x0 - cfg.lateral_out * w, box.x0 + cfg.lateral_in * w, y_lo, y_hi, dims)
    right = _make_region(box.x1 - cfg.lateral_in * w, box.x1 + cfg.lateral_out * w, y_lo, y_hi, dims)
    return left, right


def behind_region(
    box: BBox, dims: Tuple[int, int], cfg: RegionConfig = RegionConfig()
) -> Region:
    """Band of ``behind_depth`` of the box height directly below the box."""
    h = float(box.height)
    return _make_region(box.x0, box.x1, box.y1, box.y1 + cfg.behind_depth * h, dims)


def ground_region(
    box: BBox, dims: Tuple[int, int], cfg: RegionConfig = RegionConfig()
) -> Region:
    """Bottom ``ground_depth`` of the box: the band under the feet."""
    h = float(box.height)
    return _make_region(box.x0, box.x1, box.y1 - cfg.ground_depth * h, box.y1, dims)


def _region_counts(mask: np.ndarray, region: Region) -> dict[int, int]:
    if region.is_empty:
        return {}
    patch = mask[region.y0 : region.y1, region.x0 : region.x1]
    ids, counts = np.unique(patch, return_counts=True)
    return {int(i): int(c) for i, c in zip(ids, counts)}


def _qualifying(counts: dict[int, int], region: Region, cfg: RegionConfig) -> dict[int, int]:
    need = max(cfg.min_class_px, cfg.min_class_frac * region.area)
    return {cid: c for cid, c in counts.items() if c >= need}


def _excluded(
    name: str, ground_vocab: FrozenSet[str], person_classes: FrozenSet[str]
) -> bool:
    return name in ground_vocab or name in person_classes or name in VOID_CLASS_NAMES


def label_lateral(
    box: BBox,
    object_mask: np.ndarray,
    object_classes: dict,
    cfg: RegionConfig = RegionConfig(),
    ground_vocab: FrozenSet[str] = DEFAULT_GROUND_VOCABULARY,
    person_classes: FrozenSet[str] = DEFAULT_PERSON_CLASSES,
) -> set[ContextLabel]:
    """next_to / in_front_of labels from the lateral strips.

    A class present in exactly one strip is next_to; present in both it
    becomes in_front_of and the next_to label is suppressed. Person and
    ground-vocabulary classes never label.
    """
    h, w = object_mask.shape
    left, right = side_strips(box, (w, h), cfg)
    in_left = _qualifying(_region_counts(object_mask, left), left, cfg)
    in_right = _qualifying(_region_counts(object_mask, right), right, cfg)
    labels = set()
    for cid in set(in_left) | set(in_right):
        name = object_classes[cid]
        if _excluded(name, ground_vocab, person_classes):
            continue
        if cid in in_left and cid in in_right:
            labels.add(ContextLabel("in_front_of", name))
        else:
            labels.add(ContextLabel("next_to", name))
    return labels


def label_behind(
    box: BBox,
    object_mask: np.ndarray,
    object_classes: dict,
    cfg: RegionConfig = RegionConfig(),
    ground_vocab: FrozenSet[str] = DEFAULT_GROUND_VOCABULARY,
    person_classes: FrozenSet[str] = DEFAULT_PERSON_CLASSES,
) -> set[ContextLabel]:
    """behind labels from the band below the box."""
    h, w = object_mask.shape
    region = behind_region(box, (w, h), cfg)
    counts = _qualifying(_region_counts(object_mask, region), region, cfg)
    return {
        ContextLabel("behind", object_classes[cid])
        for cid in counts
        if not _excluded(object_classes[cid], ground_vocab, person_classes)
    }


def _majority(
    candidates: dict[int, int],
    mask: np.ndarray,
    box: BBox,
    classes: dict,
) -> int:
    """Largest count wins; ties broken by count over the full box, then
    lexicographically by class name."""
    best = max(candidates.values())
    tied = [cid for cid, c in candidates.items() if c == best]
    if len(tied) == 1:
        return tied[0]
    h, w = mask.shape
    clipped = box.clipped((w, h))
    full = _region_counts(mask, Region(clipped.x0, clipped.y0, clipped.x1, clipped.y1))
    return min(tied, key=lambda cid: (-full.get(cid, 0), classes[cid]))


def label_ground(
    box: BBox,
    ground_mask: np.ndarray,
    object_mask: np.ndarray,
    ground_classes: dict,
    object_classes: dict,
    cfg: RegionConfig = RegionConfig(),
    ground_vocab: FrozenSet[str] = DEFAULT_GROUND_VOCABULARY,
    person_classes: FrozenSet[str] = DEFAULT_PERSON_CLASSES,
) -> ContextLabel:
    """The single "on" label from the band under the person's feet.

    The majority ground-vocabulary class in the ground mask wins; when no
    ground class qualifies, the majority non-person class of the object
    mask in the same band is used as fallback.
    """
    h, w = ground_mask.shape
    region = ground_region(box, (w, h), cfg)

    gcounts = _qualifying(_region_counts(ground_mask, region), region, cfg)
    gcounts = {
        cid: c for cid, c in gcounts.items() if ground_classes[cid] in ground_vocab
    }
    if gcounts:
        cid = _majority(gcounts, ground_mask, box, ground_classes)
        return ContextLabel("on", ground_classes[cid])

    ocounts = _qualifying(_region_counts(object_mask, region), region, cfg)
    ocounts = {
        cid: c
        for cid, c in ocounts.items()
        if object_classes[cid] not in person_classes
        and object_classes[cid] not in VOID_CLASS_NAMES
    }
    if ocounts:
        cid = _majority(ocounts, object_mask, box, object_classes)
        return ContextLabel("on", object_classes[cid])
    raise NoGroundClass("no qualifying class under the person")


def label_context(
    box: BBox,
    masks: SegmentationMaskPair,
    cfg: RegionConfig = RegionConfig(),
    ground_vocab: FrozenSet[str] = DEFAULT_GROUND_VOCABULARY,
    person_classes: FrozenSet[str] = DEFAULT_PERSON_CLASSES,
) -> Tuple[ContextLabel, ...]:
    """All context labels for one person, deterministically ordered."""
    labels = label_lateral(
        box, masks.object_mask, masks.object_classes, cfg, ground_vocab, person_classes
    )
    labels |= label_behind(
        box, masks.object_mask, masks.object_classes, cfg, ground_vocab, person_classes
    )
    try:
        labels.add(
            label_ground(
                box,
                masks.ground_mask,
                masks.object_mask,
                masks.ground_classes,
                masks.object_classes,
                cfg,
                ground_vocab,
                person_classes,
            )
        )
    except NoGroundClass:
        pass  # zero "on" labels is allowed
    return sort_context_labels(labels)
