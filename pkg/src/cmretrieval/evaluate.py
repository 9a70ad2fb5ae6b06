"""Top-k retrieval metrics in two protocols.

Label ranking scores each sample's fused embedding against a fixed
candidate-label set (comparable to classification-style baselines);
instance recall queries the vector index with annotation texts and looks
for the source scene among the top k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Set, Tuple

import numpy as np

from .errors import EmptyIndex, MissingLabel
from .index import VectorIndex


@dataclass(frozen=True)
class EvalReport:
    protocol: str
    k_values: Tuple[int, ...]
    accuracies: Dict[int, float]   # percent, non-decreasing in k
    n_samples: int
    candidate_set_size: int

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(self.k_values))
        object.__setattr__(self, "accuracies", dict(self.accuracies))

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "k_values": list(self.k_values),
            "accuracies": {str(k): v for k, v in sorted(self.accuracies.items())},
            "n_samples": self.n_samples,
            "candidate_set_size": self.candidate_set_size,
        }

    def table(self) -> str:
        lines = [f"protocol: {self.protocol}  samples: {self.n_samples}  "
                 f"candidates: {self.candidate_set_size}"]
        lines.append("  k   accuracy")
        for k in self.k_values:
            lines.append(f"{k:>3}   {self.accuracies[k]:7.2f}%")
        return "\n".join(lines)


DEFAULT_KS = (1, 2, 3, 5)


def topk_hits_from_scores(
    scores: np.ndarray, true_cols: Sequence[Set[int]], ks: Sequence[int]
) -> Dict[int, int]:
    """Count samples whose true column ranks within the top k.

    ``scores`` is (n_samples, n_candidates); a sample hits at k when ANY
    of its true columns is among the k highest-scoring candidates (ties
    broken by candidate order).
    """
    hits = {k: 0 for k in ks}
    max_k = max(ks)
    for row, truth in zip(scores, true_cols):
        order = np.argsort(-row, kind="stable")[:max_k]
        ranks = [np.flatnonzero(order == c) for c in truth]
        best = min((int(r[0]) for r in ranks if r.size), default=max_k)
        for k in ks:
            hits[k] += best < k
    return hits


def topk_label_accuracy(
    model,
    samples: Sequence,
    true_labels: Sequence[Set[str] | str],
    candidate_labels: Sequence[str],
    ks: Sequence[int] = DEFAULT_KS,
) -> EvalReport:
    """Rank candidate label texts by cosine against each fused embedding.

    ``model`` provides embed_scenes(samples) -> (n, D) and
    encode_text(text) -> (D,), both l2-normalized. A sample with several
    valid labels hits when any of them lands in the top k.
    """
    candidates = list(candidate_labels)
    col = {label: i for i, label in enumerate(candidates)}
    true_cols: List[Set[int]] = []
    for truth in true_labels:
        labels = {truth} if isinstance(truth, str) else set(truth)
        missing = labels - col.keys()
        if missing:
            raise MissingLabel(f"labels {sorted(missing)} not in candidate set")
        true_cols.append({col[label] for label in labels})

    sample_vecs = model.embed_scenes(samples)
    cand_vecs = np.stack([model.encode_text(label) for label in candidates])
    scores = sample_vecs @ cand_vecs.T
    hits = topk_hits_from_scores(scores, true_cols, ks)
    n = len(samples)
    return EvalReport(
        protocol="label",
        k_values=tuple(ks),
        accuracies={k: 100.0 * hits[k] / n for k in ks},
        n_samples=n,
        candidate_set_size=len(candidates),
    )


def recall_at_k(
    model,
    index: VectorIndex,
    query_pairs: Sequence[Tuple[str, str]],
    ks: Sequence[int] = DEFAULT_KS,
) -> EvalReport:
    """Query the index with annotation texts; hit when the source scene
    id appears in the top k. ``query_pairs`` is (annotation_text, scene_id)."""
    if len(index) == 0:
        raise EmptyIndex("recall evaluation needs a populated index")
    max_k = max(ks)
    hits = {k: 0 for k in ks}
    for text, scene_id in query_pairs:
        ranked = index.query_topn(model.encode_text(text), max_k)
        ranked_ids = [rid for rid, _ in ranked]
        try:
            rank = ranked_ids.index(scene_id)
        except ValueError:
            rank = max_k
        for k in ks:
            hits[k] += rank < k
    n = len(query_pairs)
    return EvalReport(
        protocol="recall",
        k_values=tuple(ks),
        accuracies={k: 100.0 * hits[k] / n for k in ks},
        n_samples=n,
        candidate_set_size=len(index),
    )
