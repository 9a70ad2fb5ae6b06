import numpy as np
import pytest
from fastapi.testclient import TestClient

from cmretrieval.config import EmbedSettings, FusionSettings, PipelineConfig, TrainSettings
from cmretrieval.manifest import sample_to_dict
from cmretrieval.pipeline import build_index, train_model
from cmretrieval.service import ServiceState, create_app
from cmretrieval.synthetic import generate_dataset


@pytest.fixture(scope="module")
def served():
    """A small trained pipeline behind a TestClient."""
    cfg = PipelineConfig(
        embed=EmbedSettings(dim=16, hidden=64),
        fusion=FusionSettings(projection_hidden=64),
        train=TrainSettings(batch_size=6, lr_start=6e-3, lr_end=6e-4, epochs=10, seed=0),
    )
    samples = generate_dataset(24, seed=8)
    model, _ = train_model(samples, cfg)
    index = build_index(samples, model)
    state = ServiceState(
        config=cfg, model=model, index=index, scenes={s.id: s for s in samples}
    )
    return TestClient(create_app(state)), samples


def test_health_ok(served):
    client, samples = served
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["index_size"] == len(samples)
    assert body["model_version"].startswith("v1-")


def test_health_degraded_fresh_server():
    client = TestClient(create_app(ServiceState()))
    body = client.get("/health").json()
    assert body == {"status": "degraded", "index_size": 0, "model_version": None}


def test_query_returns_ranked_results(served):
    client, _ = served
    resp = client.post("/query", json={"text": "walking crosswalk", "top_n": 5})
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["results"]) == 5
    scores = [r["score"] for r in body["results"]]
    assert scores == sorted(scores, reverse=True)
    assert body["latency_ms"] >= 0.0
    assert body["results"][0]["metadata"]["annotations"]["simple"]


def test_query_deterministic(served):
    client, _ = served
    a = client.post("/query", json={"text": "running road", "top_n": 7}).json()
    b = client.post("/query", json={"text": "running road", "top_n": 7}).json()
    assert a["results"] == b["results"]


def test_query_validation_errors(served):
    client, _ = served
    assert client.post("/query", json={"text": "", "top_n": 5}).status_code == 400
    assert client.post("/query", json={"text": "   ", "top_n": 5}).status_code == 400
    assert client.post("/query", json={"text": "x", "top_n": 0}).status_code == 400
    assert client.post("/query", json={"text": "x", "top_n": 99999}).status_code == 400
    assert client.post("/query", json={"text": "x", "top_n": "nope"}).status_code == 400


def test_query_unloaded_index_503():
    client = TestClient(create_app(ServiceState()))
    resp = client.post("/query", json={"text": "anything", "top_n": 3})
    assert resp.status_code == 503


def test_scene_detail(served):
    client, samples = served
    sid = samples[0].id
    body = client.get(f"/scenes/{sid}").json()
    assert body["id"] == sid
    assert body["annotations"]["simple"]
    assert "masks" not in body  # raster payloads are opt-in


def test_scene_detail_include_masks(served):
    client, samples = served
    sid = samples[0].id
    body = client.get(f"/scenes/{sid}", params={"include": "masks"}).json()
    assert set(body["masks"]) == {"object", "ground"}
    import base64

    from cmretrieval.rle import rle_decode

    raw = base64.b64decode(body["masks"]["object"]["rle"])
    decoded = rle_decode(raw, tuple(body["image_dims"]))
    assert np.array_equal(decoded, samples[0].masks.object_mask)


def test_scene_unknown_404(served):
    client, _ = served
    assert client.get("/scenes/does-not-exist").status_code == 404


def test_ingest_scene_endpoint(served):
    client, samples = served
    size_before = client.get("/health").json()["index_size"]
    new = generate_dataset(1, seed=99)[0]
    record = sample_to_dict(new)
    record["id"] = "ingested-0001"
    resp = client.post("/scenes", json=record)
    assert resp.status_code == 201
    assert resp.json()["index_size"] == size_before + 1
    assert client.get("/scenes/ingested-0001").status_code == 200
    # same validation as CLI ingest: malformed record is a 400
    bad = dict(record)
    bad["id"] = "ingested-0002"
    bad["joints"] = record["joints"][:-3]
    assert client.post("/scenes", json=bad).status_code == 400
    # duplicate id is a conflict
    assert client.post("/scenes", json=record).status_code == 409
