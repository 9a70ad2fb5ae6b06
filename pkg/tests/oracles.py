"""Independent oracles the implementation is checked against.

These deliberately avoid the production code paths: the context oracle
evaluates per-pixel membership predicates over the whole raster, the
segment oracle interprets the validity rules over a string with regex,
and the LOWESS oracle is a plain-loop reimplementation.
"""

from __future__ import annotations

import re
from math import ceil
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from cmretrieval.context import RegionConfig, VOID_CLASS_NAMES
from cmretrieval.types import BBox, ContextLabel, sort_context_labels


# -- brute-force context labeling ----------------------------------------


def _membership(
    dims: Tuple[int, int], x_lo: float, x_hi: float, y_lo: float, y_hi: float
) -> np.ndarray:
    """Boolean (H, W) mask of pixels fully covered by the region.

    Pixel (px, py) spans [px, px+1) x [py, py+1); it belongs iff
    px >= x_lo, px+1 <= x_hi, py >= y_lo, py+1 <= y_hi. Image clipping is
    implied because pixel indices already lie inside the image.
    """
    w, h = dims
    xs = np.arange(w)
    ys = np.arange(h)
    in_x = (xs >= x_lo) & (xs + 1 <= x_hi)
    in_y = (ys >= y_lo) & (ys + 1 <= y_hi)
    return in_y[:, None] & in_x[None, :]


def _counts(mask: np.ndarray, member: np.ndarray) -> dict:
    ids, counts = np.unique(mask[member], return_counts=True)
    return {int(i): int(c) for i, c in zip(ids, counts)}


def _passing(counts: dict, area: int, cfg: RegionConfig) -> Set[int]:
    need = max(cfg.min_class_px, cfg.min_class_frac * area)
    return {cid for cid, c in counts.items() if c >= need}


def oracle_context_labels(
    box: BBox,
    object_mask: np.ndarray,
    ground_mask: np.ndarray,
    object_classes: dict,
    ground_classes: dict,
    cfg: RegionConfig,
    ground_vocab,
    person_classes,
) -> Tuple[ContextLabel, ...]:
    h, w = object_mask.shape
    dims = (w, h)
    bw, bh = float(box.width), float(box.height)

    def excluded(name: str) -> bool:
        return name in ground_vocab or name in person_classes or name in VOID_CLASS_NAMES

    left = _membership(
        dims,
        box.x0 - cfg.lateral_out * bw, box.x0 + cfg.lateral_in * bw,
        box.y0 + cfg.lateral_v_lo * bh, box.y0 + cfg.lateral_v_hi * bh,
    )
    right = _membership(
        dims,
        box.x1 - cfg.lateral_in * bw, box.x1 + cfg.lateral_out * bw,
        box.y0 + cfg.lateral_v_lo * bh, box.y0 + cfg.lateral_v_hi * bh,
    )
    behind = _membership(dims, box.x0, box.x1, box.y1, box.y1 + cfg.behind_depth * bh)
    ground = _membership(dims, box.x0, box.x1, box.y1 - cfg.ground_depth * bh, box.y1)
    box_area = _membership(dims, box.x0, box.x1, box.y0, box.y1)

    labels = []

    in_left = _passing(_counts(object_mask, left), int(left.sum()), cfg)
    in_right = _passing(_counts(object_mask, right), int(right.sum()), cfg)
    for cid in in_left | in_right:
        name = object_classes[cid]
        if excluded(name):
            continue
        relation = "in_front_of" if (cid in in_left and cid in in_right) else "next_to"
        labels.append(ContextLabel(relation, name))

    for cid in _passing(_counts(object_mask, behind), int(behind.sum()), cfg):
        name = object_classes[cid]
        if not excluded(name):
            labels.append(ContextLabel("behind", name))

    on = _oracle_ground(
        ground, box_area, ground_mask, object_mask, ground_classes, object_classes,
        cfg, ground_vocab, person_classes,
    )
    if on is not None:
        labels.append(on)
    return sort_context_labels(labels)


def _oracle_ground(
    band, box_area, ground_mask, object_mask, ground_classes, object_classes,
    cfg, ground_vocab, person_classes,
) -> Optional[ContextLabel]:
    area = int(band.sum())
    gcand = {
        cid: c
        for cid, c in _counts(ground_mask, band).items()
        if cid in _passing(_counts(ground_mask, band), area, cfg)
        and ground_classes[cid] in ground_vocab
    }
    if gcand:
        cid = _break_ties(gcand, ground_mask, box_area, ground_classes)
        return ContextLabel("on", ground_classes[cid])
    ocand = {
        cid: c
        for cid, c in _counts(object_mask, band).items()
        if cid in _passing(_counts(object_mask, band), area, cfg)
        and object_classes[cid] not in person_classes
        and object_classes[cid] not in VOID_CLASS_NAMES
    }
    if ocand:
        cid = _break_ties(ocand, object_mask, box_area, object_classes)
        return ContextLabel("on", object_classes[cid])
    return None


def _break_ties(candidates: dict, mask, box_area, classes) -> int:
    best = max(candidates.values())
    tied = sorted(cid for cid, c in candidates.items() if c == best)
    if len(tied) == 1:
        return tied[0]
    full = _counts(mask, box_area)
    return min(tied, key=lambda cid: (-full.get(cid, 0), classes[cid]))


# -- segment-extraction rule interpreter ----------------------------------


def oracle_segments(valid: Sequence[bool], seq_len: int = 20, max_gap: int = 2) -> List[List[int]]:
    """Interpret the validity rules over a V/I string with regex splits."""
    s = "".join("V" if v else "I" for v in valid)
    first = s.find("V")
    if first == -1:
        return []
    last = s.rfind("V")
    core = s[first : last + 1]
    segments: List[List[int]] = []
    pos = 0
    spans = []
    for m in re.finditer(f"I{{{max_gap + 1},}}", core):
        spans.append((pos, m.start()))
        pos = m.end()
    spans.append((pos, len(core)))
    for a, b in spans:
        for k in range((b - a) // seq_len):
            start = first + a + k * seq_len
            segments.append(list(range(start, start + seq_len)))
    return segments


# -- plain-loop LOWESS -----------------------------------------------------


def oracle_lowess(y: Sequence[float], frac: float = 0.5, robust_iters: int = 2) -> np.ndarray:
    """Straightforward loop reimplementation of the smoother.

    Same definition as production (tri-cube over the q nearest neighbors,
    centered weighted linear fit, bisquare reweighting, identical
    degenerate-case guards) but written with explicit per-point loops.
    """
    y = [float(v) for v in y]
    n = len(y)
    q = min(max(int(ceil(frac * n)), 2), n)
    est = [0.0] * n
    delta = [1.0] * n
    for round_idx in range(robust_iters + 1):
        for i in range(n):
            dists = sorted(abs(j - i) for j in range(n))
            hi = max(dists[q - 1], 1e-12)
            sw = swx = swxx = swy = swxy = 0.0
            for j in range(n):
                u = abs(j - i) / hi
                if u >= 1.0:
                    continue
                wj = delta[j] * (1.0 - u**3) ** 3
                dx = float(j - i)
                sw += wj
                swx += wj * dx
                swxx += wj * dx * dx
                swy += wj * y[j]
                swxy += wj * dx * y[j]
            if sw <= 0.0:
                est[i] = y[i]
                continue
            det = sw * swxx - swx * swx
            if det <= 1e-12 * max(sw * swxx, 1.0):
                est[i] = swy / sw
            else:
                est[i] = (swxx * swy - swx * swxy) / det
        if round_idx == robust_iters:
            break
        residuals = [yv - ev for yv, ev in zip(y, est)]
        s = float(np.median([abs(r) for r in residuals]))
        if s <= 1e-14 * max(1.0, max(abs(v) for v in y)):
            break
        delta = []
        for r in residuals:
            u = min(max(r / (6.0 * s), -1.0), 1.0)
            delta.append((1.0 - u * u) ** 2)
    return np.asarray(est)
