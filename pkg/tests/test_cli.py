import json

import numpy as np
import pytest
from click.testing import CliRunner

from cmretrieval.cli import main
from cmretrieval.manifest import load_manifest

CONFIG_YAML = """
embed: {dim: 32, hidden: 64}
fusion: {projection_hidden: 64}
train: {batch_size: 6, lr_start: 6.0e-3, lr_end: 6.0e-4, epochs: 10, seed: 0}
"""


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, runner):
    """Run the full CLI pipeline once into a shared directory."""
    ws = tmp_path_factory.mktemp("cli")
    cfg = ws / "config.yaml"
    cfg.write_text(CONFIG_YAML)

    def run(*args):
        result = runner.invoke(main, ["--config", str(cfg), *args])
        assert result.exit_code == 0, result.output
        return result

    run("gen-synthetic", "--n", "24", "--seed", "7", "--out", str(ws / "raw.jsonl"))
    run("ingest", "--input", str(ws / "raw.jsonl"), "--output", str(ws / "store.jsonl"))
    run("annotate", "--input", str(ws / "store.jsonl"), "--output", str(ws / "labeled.jsonl"))
    run("train", "--input", str(ws / "labeled.jsonl"), "--model-out", str(ws / "model.bin"),
        "--history-out", str(ws / "history.json"))
    run("embed", "--input", str(ws / "labeled.jsonl"), "--model", str(ws / "model.bin"),
        "--output", str(ws / "emb.jsonl"))
    run("index", "--input", str(ws / "emb.jsonl"), "--output", str(ws / "index.bin"))
    return ws, run


def test_gen_synthetic_deterministic(runner, tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    for out in (a, b):
        result = runner.invoke(
            main, ["gen-synthetic", "--n", "10", "--seed", "1", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
    assert a.read_bytes() == b.read_bytes()


def test_ingest_canonical_copy(workspace):
    ws, _ = workspace
    raw = (ws / "raw.jsonl").read_text().splitlines()
    store = (ws / "store.jsonl").read_text().splitlines()
    assert raw == store  # generator output is already canonical


def test_annotate_matches_ground_truth(workspace):
    ws, _ = workspace
    for sample in load_manifest(ws / "labeled.jsonl"):
        assert sample.annotations == sample.ground_truth


def test_train_history_written(workspace):
    ws, _ = workspace
    history = json.loads((ws / "history.json").read_text())
    assert len(history["loss"]) == 10
    assert history["loss"][-1] < history["loss"][0]


def test_embed_output_schema(workspace):
    ws, _ = workspace
    rows = [json.loads(line) for line in (ws / "emb.jsonl").read_text().splitlines()]
    assert len(rows) == 24
    vec = np.asarray(rows[0]["vector"])
    assert vec.shape == (32,)
    assert np.isclose(np.linalg.norm(vec), 1.0, atol=1e-5)
    assert rows[0]["metadata"]["annotations"]["simple"]


def test_query_one_shot(workspace, runner):
    ws, _ = workspace
    result = runner.invoke(main, [
        "query", "--model", str(ws / "model.bin"), "--index", str(ws / "index.bin"),
        "--text", "A person is running on the road", "--top-n", "3",
    ])
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    assert len(body["results"]) == 3
    scores = [r["score"] for r in body["results"]]
    assert scores == sorted(scores, reverse=True)


def test_eval_label_protocol(workspace, runner):
    ws, _ = workspace
    result = runner.invoke(main, [
        "eval", "--input", str(ws / "labeled.jsonl"), "--model", str(ws / "model.bin"),
        "--ks", "1,5", "--report-out", str(ws / "report.json"),
    ])
    assert result.exit_code == 0, result.output
    report = json.loads((ws / "report.json").read_text())
    assert report["protocol"] == "label"
    assert set(report["accuracies"]) == {"1", "5"}


def test_eval_recall_protocol(workspace, runner):
    ws, _ = workspace
    result = runner.invoke(main, [
        "eval", "--input", str(ws / "labeled.jsonl"), "--model", str(ws / "model.bin"),
        "--protocol", "recall", "--ks", "1,5",
    ])
    assert result.exit_code == 0, result.output
    assert "recall" in result.output


def test_validation_errors_exit_2(workspace, runner, tmp_path):
    ws, _ = workspace
    result = runner.invoke(main, ["gen-synthetic", "--n", "0", "--seed", "1",
                                  "--out", str(tmp_path / "x.jsonl")])
    assert result.exit_code == 2
    result = runner.invoke(main, [
        "query", "--model", str(ws / "model.bin"), "--index", str(ws / "index.bin"),
        "--text", "   ",
    ])
    assert result.exit_code == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n")
    result = runner.invoke(main, ["ingest", "--input", str(bad),
                                  "--output", str(tmp_path / "out.jsonl")])
    assert result.exit_code == 2
    result = runner.invoke(main, [
        "eval", "--input", str(ws / "labeled.jsonl"), "--model", str(ws / "model.bin"),
        "--ks", "1,banana",
    ])
    assert result.exit_code == 2


def test_eval_split_resolution(workspace, runner, tmp_path):
    ws, _ = workspace
    workdir = tmp_path / "wsdir"
    workdir.mkdir()
    (workdir / "val.jsonl").write_bytes((ws / "labeled.jsonl").read_bytes())
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(CONFIG_YAML + f"paths: {{workdir: '{workdir}'}}\n")
    result = runner.invoke(main, [
        "--config", str(cfg), "eval", "--split", "val",
        "--model", str(ws / "model.bin"), "--ks", "1",
    ])
    assert result.exit_code == 0, result.output
    result = runner.invoke(main, [
        "--config", str(cfg), "eval", "--split", "missing",
        "--model", str(ws / "model.bin"),
    ])
    assert result.exit_code == 2
    result = runner.invoke(main, ["eval", "--model", str(ws / "model.bin")])
    assert result.exit_code == 2
