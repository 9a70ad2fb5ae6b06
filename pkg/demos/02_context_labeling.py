#!/usr/bin/env python3
"""Walk through the geometric context rules on a hand-built scene.

Shows the four rule regions induced by a person box, then the labels the
pipeline derives from each. Run as:  python3 demos/02_context_labeling.py
"""

import numpy as np

from cmretrieval.context import (
    RegionConfig,
    behind_region,
    ground_region,
    label_behind,
    label_context,
    label_ground,
    label_lateral,
    side_strips,
)
from cmretrieval.types import BBox, SegmentationMaskPair

OBJ = {0: "void", 1: "person", 2: "car", 3: "bus"}
GND = {0: "void", 1: "road", 2: "sidewalk"}

dims = (400, 300)
box = BBox(180, 100, 220, 260)  # 40x160 person box
cfg = RegionConfig()

left, right = side_strips(box, dims, cfg)
print(f"person box: {box}")
print(f"left strip:   x [{left.x0}, {left.x1})  y [{left.y0}, {left.y1})")
print(f"right strip:  x [{right.x0}, {right.x1})  y [{right.y0}, {right.y1})")
behind = behind_region(box, dims, cfg)
print(f"behind band:  x [{behind.x0}, {behind.x1})  y [{behind.y0}, {behind.y1})")
ground = ground_region(box, dims, cfg)
print(f"ground band:  x [{ground.x0}, {ground.x1})  y [{ground.y0}, {ground.y1})")

# Paint a scene: bus on both sides (-> in front of), car below (-> behind),
# sidewalk under the feet (-> on).
object_mask = np.zeros((300, 400), dtype=np.int64)
ground_mask = np.zeros((300, 400), dtype=np.int64)
object_mask[box.y0:box.y1, box.x0:box.x1] = 1
for strip in (left, right):
    object_mask[strip.y0:strip.y1, strip.x0:strip.x1] = 3
object_mask[behind.y0:behind.y1, behind.x0:behind.x1] = 2
ground_mask[ground.y0 - 10 : ground.y1 + 10, ground.x0 - 10 : ground.x1 + 10] = 2

print("\nlateral:", sorted(
    (c.relation, c.class_name) for c in label_lateral(box, object_mask, OBJ, cfg)
))
print("behind: ", sorted(
    (c.relation, c.class_name) for c in label_behind(box, object_mask, OBJ, cfg)
))
on = label_ground(box, ground_mask, object_mask, GND, OBJ, cfg)
print("ground: ", (on.relation, on.class_name))

masks = SegmentationMaskPair(object_mask, ground_mask, OBJ, GND)
labels = label_context(box, masks, cfg)
print("\ncombined, deterministic order:")
for c in labels:
    print(f"  ({c.relation}, {c.class_name})")

# The bus appears in BOTH strips, so next_to is upgraded to in_front_of.
assert ("in_front_of", "bus") in [(c.relation, c.class_name) for c in labels]
assert ("next_to", "bus") not in [(c.relation, c.class_name) for c in labels]
print("\nnext_to suppressed in favor of in_front_of when both strips match")
