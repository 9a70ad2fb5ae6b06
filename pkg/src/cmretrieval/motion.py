"""Track-to-sequence pipeline: validity trimming, splitting, gap fill,
root-orientation smoothing, and similarity-based motion labeling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyVocabulary, GapTooLarge, ZeroVector
from .lowess import LowessConfig, lowess_smooth
from .types import SEQUENCE_LENGTH, BBox, MotionSequence, TrackObservation


@dataclass(frozen=True)
class ValidityConfig:
    min_box_w: int = 35
    min_box_h: int = 90
    seq_len: int = SEQUENCE_LENGTH
    max_gap: int = 2

    def __post_init__(self):
        if min(self.min_box_w, self.min_box_h, self.seq_len) <= 0 or self.max_gap < 0:
            raise ValueError("validity thresholds must be positive")
        if self.max_gap >= self.seq_len:
            raise ValueError("max_gap must be smaller than seq_len")

    def is_valid(self, obs: TrackObservation) -> bool:
        box = obs.box
        return (
            box is not None
            and box.width >= self.min_box_w
            and box.height >= self.min_box_h
        )


@dataclass(frozen=True)
class Segment:
    """A fixed-length span cut from one track, pre gap-fill."""

    observations: Tuple[TrackObservation, ...]
    source_indices: Tuple[int, ...]  # positions in the input track


def extract_valid_segments(
    track: Sequence[TrackObservation], cfg: ValidityConfig = ValidityConfig()
) -> list[Segment]:
    """Cut a raw track into non-overlapping fixed-length segments.

    Leading and trailing frames with missing or undersized boxes are
    dropped. Interior runs of more than ``max_gap`` consecutive invalid
    frames split the track; each resulting run contributes
    ``floor(len / seq_len)`` segments from its start, and runs shorter
    than ``seq_len`` are discarded. Segments never span a split point.
    """
    valid = [cfg.is_valid(o) for o in track]
    if not any(valid):
        return []
    first = valid.index(True)
    last = len(valid) - 1 - valid[::-1].index(True)

    # Runs between oversized gaps, inclusive index ranges into `track`.
    runs: list[Tuple[int, int]] = []
    run_start = first
    i = first
    while i <= last:
        if valid[i]:
            i += 1
            continue
        gap_start = i
        while i <= last and not valid[i]:
            i += 1
        if i - gap_start > cfg.max_gap:
            if gap_start - 1 >= run_start:
                runs.append((run_start, gap_start - 1))
            run_start = i
    runs.append((run_start, last))

    segments: list[Segment] = []
    for lo, hi in runs:
        length = hi - lo + 1
        for k in range(length // cfg.seq_len):
            s = lo + k * cfg.seq_len
            idx = tuple(range(s, s + cfg.seq_len))
            segments.append(
                Segment(
                    observations=tuple(track[j] for j in idx),
                    source_indices=idx,
                )
            )
    return segments


def _lerp_box(a: BBox, b: BBox, t: float) -> BBox:
    coords = [
        int(round((1.0 - t) * pa + t * pb))
        for pa, pb in zip((a.x0, a.y0, a.x1, a.y1), (b.x0, b.y0, b.x1, b.y1))
    ]
    return BBox(*coords)


def _nlerp_quat(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    if float(np.dot(a, b)) < 0.0:
        b = -b
    q = (1.0 - t) * a + t * b
    return q / np.linalg.norm(q)


def fill_gaps(
    segment: Segment | Sequence[TrackObservation],
    cfg: ValidityConfig = ValidityConfig(),
    track_id: str = "",
) -> MotionSequence:
    """Reconstruct missing frames inside a segment by interpolation.

    Joints and boxes are interpolated linearly, quaternions by
    sign-consistent normalized linear interpolation. A missing frame at
    a segment edge (possible when a chunk boundary cuts through a
    tolerated gap) is filled from its nearest valid neighbor.
    """
    obs = segment.observations if isinstance(segment, Segment) else tuple(segment)
    n = len(obs)
    present = [
        cfg.is_valid(o) and o.joints is not None and o.root_quat is not None
        for o in obs
    ]
    if not any(present):
        raise GapTooLarge("segment has no usable frames")
    run = 0
    for flag in present:
        run = 0 if flag else run + 1
        if run > cfg.max_gap:
            raise GapTooLarge(f"more than {cfg.max_gap} consecutive missing frames")

    joints = np.empty((n, obs[0].joints.shape[0] if obs[0].joints is not None else 24, 3))
    quats = np.empty((n, 4))
    boxes: list[Optional[BBox]] = [None] * n
    valid_idx = [i for i, p in enumerate(present) if p]
    for i in valid_idx:
        joints[i] = obs[i].joints
        quats[i] = obs[i].root_quat
        boxes[i] = obs[i].box

    for i in range(n):
        if present[i]:
            continue
        prev = max((j for j in valid_idx if j < i), default=None)
        nxt = min((j for j in valid_idx if j > i), default=None)
        if prev is not None and nxt is not None:
            t = (i - prev) / (nxt - prev)
            joints[i] = (1.0 - t) * joints[prev] + t * joints[nxt]
            quats[i] = _nlerp_quat(quats[prev], quats[nxt], t)
            boxes[i] = _lerp_box(boxes[prev], boxes[nxt], t)
        else:
            src = prev if prev is not None else nxt
            joints[i] = joints[src]
            quats[i] = quats[src]
            boxes[i] = boxes[src]

    return MotionSequence(
        track_id=track_id,
        joints=joints,
        root_orientation=quats,
        boxes=tuple(boxes),
    )


def align_quaternion_signs(quats: np.ndarray) -> np.ndarray:
    """Flip quaternion signs so consecutive frames have dot >= 0."""
    out = np.array(quats, dtype=np.float64, copy=True)
    for t in range(1, out.shape[0]):
        if float(np.dot(out[t], out[t - 1])) < 0.0:
            out[t] = -out[t]
    return out


def smooth_root_orientation(
    seq: MotionSequence, cfg: LowessConfig = LowessConfig()
) -> MotionSequence:
    """LOWESS-smooth the root orientation; joints and boxes untouched.

    Quaternions are sign-aligned to the previous frame, each of the four
    components is smoothed independently, and rows are renormalized.
    """
    aligned = align_quaternion_signs(seq.root_orientation)
    smoothed = np.column_stack([lowess_smooth(aligned[:, j], cfg) for j in range(4)])
    norms = np.linalg.norm(smoothed, axis=1)
    degenerate = norms < 1e-8
    if np.any(degenerate):
        smoothed[degenerate] = aligned[degenerate]
        norms[degenerate] = 1.0
    smoothed /= norms[:, None]
    return MotionSequence(
        track_id=seq.track_id,
        joints=seq.joints,
        root_orientation=smoothed,
        boxes=seq.boxes,
        frame_rate_hz=seq.frame_rate_hz,
    )


DEFAULT_EXCLUDED_WORDS = frozenset({"play instrument", "turn"})


@dataclass(frozen=True)
class MotionVocabulary:
    """Word embeddings to score motion sequences against.

    Entries are stored l2-normalized; excluded words are dropped at
    construction. ``center`` is the embedding-space offset subtracted
    from sequence embeddings before scoring (see embed_for_vocabulary).
    """

    words: Tuple[str, ...]
    embeddings: np.ndarray  # (n_words, D), rows unit-norm
    threshold: float = 0.2
    excluded_words: frozenset = DEFAULT_EXCLUDED_WORDS
    center: Optional[np.ndarray] = None

    def __post_init__(self):
        keep = [i for i, w in enumerate(self.words) if w not in self.excluded_words]
        words = tuple(self.words[i] for i in keep)
        emb = np.asarray(self.embeddings, dtype=np.float64)[keep]
        if emb.ndim != 2 or emb.shape[0] != len(words):
            raise ValueError("embeddings must be (n_words, D)")
        norms = np.linalg.norm(emb, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            raise ValueError("vocabulary embeddings must be non-zero")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "embeddings", emb / norms)
        if self.center is not None:
            object.__setattr__(
                self, "center", np.asarray(self.center, dtype=np.float64)
            )

    def __len__(self) -> int:
        return len(self.words)


def label_motion(motion_embedding: np.ndarray, vocab: MotionVocabulary) -> list[str]:
    """Rank vocabulary words by cosine similarity.

    Returns the top-1 word followed by every other word with similarity
    above the vocabulary threshold, in descending order. The top-1 word
    is always kept, even when its similarity is at or below threshold.
    """
    if len(vocab) == 0:
        raise EmptyVocabulary("motion vocabulary has no entries")
    v = np.asarray(motion_embedding, dtype=np.float64).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroVector("motion embedding is zero")
    sims = vocab.embeddings @ (v / norm)
    order = np.argsort(-sims, kind="stable")
    result = [vocab.words[order[0]]]
    result.extend(
        vocab.words[i] for i in order[1:] if sims[i] > vocab.threshold
    )
    return result


def embed_for_vocabulary(
    encode: Callable[[np.ndarray], np.ndarray],
    joints: np.ndarray,
    vocab: MotionVocabulary,
) -> np.ndarray:
    """Embed a joint sequence for scoring against a centered vocabulary."""
    v = np.asarray(encode(joints), dtype=np.float64).reshape(-1)
    if vocab.center is not None:
        v = v - vocab.center
    return v


def build_prototype_vocabulary(
    encode: Callable[[np.ndarray], np.ndarray],
    family_samplers: dict,
    samples_per_family: int = 16,
    seed: int = 0,
    threshold: float = 0.2,
    excluded_words: frozenset = DEFAULT_EXCLUDED_WORDS,
    sharpen: float = 1e-2,
) -> MotionVocabulary:
    """Build a vocabulary from per-family embedding centroids.

    ``family_samplers`` maps word -> callable(rng) producing a (20, 24, 3)
    joint sequence. Centroids are mean-centered across families and then
    turned into a regularized dual basis (rows w_i with w_i . c_j ~ d_ij),
    so each word responds to its own family and stays well under the
    similarity threshold on the others, even with a randomly initialized
    encoder whose raw embeddings share a large common component.
    """
    rng = np.random.default_rng(seed)
    words = tuple(sorted(family_samplers))
    centroids = []
    for word in words:
        vecs = [
            np.asarray(encode(family_samplers[word](rng)), dtype=np.float64).reshape(-1)
            for _ in range(samples_per_family)
        ]
        centroids.append(np.mean(vecs, axis=0))
    centroids = np.asarray(centroids)
    center = centroids.mean(axis=0)
    centered = centroids - center
    if sharpen > 0.0 and len(words) > 1:
        gram = centered @ centered.T
        lam = sharpen * np.trace(gram) / len(words)
        entries = np.linalg.solve(gram + lam * np.eye(len(words)), centered)
    else:
        entries = centered
    return MotionVocabulary(
        words=words,
        embeddings=entries,
        threshold=threshold,
        excluded_words=excluded_words,
        center=center,
    )
