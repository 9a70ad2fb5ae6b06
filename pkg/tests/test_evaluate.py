import numpy as np
import pytest

from cmretrieval.errors import EmptyIndex, MissingLabel
from cmretrieval.evaluate import (
    EvalReport,
    recall_at_k,
    topk_hits_from_scores,
    topk_label_accuracy,
)
from cmretrieval.index import VectorIndex


class StubModel:
    """Maps samples and label texts to fixed unit vectors."""

    def __init__(self, sample_vecs, label_vecs):
        self.sample_vecs = np.asarray(sample_vecs, dtype=float)
        self.label_vecs = {k: np.asarray(v, dtype=float) for k, v in label_vecs.items()}

    def embed_scenes(self, samples):
        return self.sample_vecs[[int(s) for s in samples]]

    def encode_text(self, text):
        return self.label_vecs[text]


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_perfect_model_all_ks():
    labels = ["a", "b", "c"]
    vecs = np.eye(3)
    model = StubModel(vecs, dict(zip(labels, vecs)))
    report = topk_label_accuracy(model, ["0", "1", "2"], labels, labels, (1, 2, 3, 5))
    assert all(v == 100.0 for v in report.accuracies.values())
    assert report.candidate_set_size == 3


def test_counting_example_ranks_1_2_6():
    # candidate scores arranged so true labels rank 1st, 2nd, and 6th
    n_candidates = 6
    scores = np.zeros((3, n_candidates))
    scores[0] = [9, 5, 4, 3, 2, 1]   # truth col 0 -> rank 1
    scores[1] = [9, 5, 4, 3, 2, 1]   # truth col 1 -> rank 2
    scores[2] = [9, 5, 4, 3, 2, 1]   # truth col 5 -> rank 6
    hits = topk_hits_from_scores(scores, [{0}, {1}, {5}], (1, 2, 5))
    assert hits == {1: 1, 2: 2, 5: 2}
    # as percentages: 33.3 / 66.7 / 66.7
    assert 100 * hits[1] / 3 == pytest.approx(33.33, abs=0.01)


def test_random_model_matches_binomial(rng):
    # Orthonormal candidates keep per-sample hits independent, so the
    # binomial bound applies.
    n, c, dim = 1000, 20, 24
    sample_vecs = rng.normal(size=(n, dim))
    basis, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    label_names = [f"l{i}" for i in range(c)]
    label_vecs = {name: basis[i] for i, name in enumerate(label_names)}
    model = StubModel(sample_vecs, label_vecs)
    truth = [label_names[int(rng.integers(c))] for i in range(n)]
    report = topk_label_accuracy(
        model, [str(i) for i in range(n)], truth, label_names, (1, 5)
    )
    for k in (1, 5):
        expected = 100.0 * k / c
        sigma = 100.0 * np.sqrt((k / c) * (1 - k / c) / n)
        assert abs(report.accuracies[k] - expected) < 3 * sigma + 1e-9


def test_multiple_valid_labels_any_hit_counts():
    labels = ["a", "b"]
    vecs = np.eye(2)
    model = StubModel(vecs[:1], dict(zip(labels, vecs)))
    report = topk_label_accuracy(model, ["0"], [{"a", "b"}], labels, (1,))
    assert report.accuracies[1] == 100.0


def test_missing_label_raises():
    model = StubModel(np.eye(2), {"a": np.array([1.0, 0.0])})
    with pytest.raises(MissingLabel):
        topk_label_accuracy(model, ["0"], ["zzz"], ["a"], (1,))


def test_accuracy_monotone_in_k(rng):
    scores = rng.normal(size=(50, 10))
    truth = [{int(rng.integers(10))} for _ in range(50)]
    hits = topk_hits_from_scores(scores, truth, (1, 2, 3, 5))
    assert hits[1] <= hits[2] <= hits[3] <= hits[5]


def test_recall_single_record():
    index = VectorIndex(2)
    index.insert("scene", np.array([1.0, 0.0]))
    model = StubModel(np.eye(2), {"its text": np.array([1.0, 0.0])})
    report = recall_at_k(model, index, [("its text", "scene")], (1,))
    assert report.accuracies[1] == 100.0


def test_recall_tie_break_deterministic():
    index = VectorIndex(2)
    v = np.array([1.0, 0.0])
    index.insert("first", v)
    index.insert("second", v)
    model = StubModel(np.eye(2), {"q": v})
    r_first = recall_at_k(model, index, [("q", "first")], (1,))
    r_second = recall_at_k(model, index, [("q", "second")], (1,))
    assert r_first.accuracies[1] == 100.0  # insertion order wins the tie
    assert r_second.accuracies[1] == 0.0
    assert recall_at_k(model, index, [("q", "second")], (2,)).accuracies[2] == 100.0


def test_recall_monotone(rng):
    index = VectorIndex(4)
    texts = {}
    pairs = []
    for i in range(30):
        vec = rng.normal(size=4)
        index.insert(f"s{i}", vec)
        texts[f"t{i}"] = vec + rng.normal(0, 0.8, size=4)
        pairs.append((f"t{i}", f"s{i}"))
    model = StubModel(np.zeros((0, 4)), texts)
    report = recall_at_k(model, index, pairs, (1, 5))
    assert report.accuracies[5] >= report.accuracies[1]


def test_recall_empty_index():
    model = StubModel(np.eye(2), {"q": np.array([1.0, 0.0])})
    with pytest.raises(EmptyIndex):
        recall_at_k(model, VectorIndex(2), [("q", "s")], (1,))


def test_report_serialization():
    report = EvalReport("label", (1, 5), {1: 50.0, 5: 90.0}, 10, 4)
    d = report.as_dict()
    assert d["accuracies"] == {"1": 50.0, "5": 90.0}
    assert "label" in report.table()
