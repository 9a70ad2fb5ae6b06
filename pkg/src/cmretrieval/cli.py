"""Command-line entry points for the full pipeline.

Typical flow:
    cmretrieval gen-synthetic --n 100 --seed 1 --out raw.jsonl
    cmretrieval annotate --input raw.jsonl --output labeled.jsonl
    cmretrieval train --input labeled.jsonl --model-out model.bin
    cmretrieval embed --input labeled.jsonl --model model.bin --output emb.jsonl
    cmretrieval index --input emb.jsonl --output index.bin
    cmretrieval serve --model model.bin --index index.bin --scenes labeled.jsonl
    cmretrieval query --model model.bin --index index.bin --text "..."

Exit codes: 0 on success, 2 on validation errors.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import click
import numpy as np

from .config import DEFAULT_PORT, ENV_PORT, PipelineConfig, load_config
from .embed.model import RetrievalModel
from .errors import CMRetrievalError
from .evaluate import recall_at_k, topk_label_accuracy
from .index import VectorIndex
from .manifest import load_manifest, validate_manifest, write_manifest
from .pipeline import (
    annotate_samples,
    build_index,
    candidate_labels,
    first_annotation,
    train_model,
)
from .synthetic import generate_dataset


def _fail(message: str):
    raise click.UsageError(message)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML config file (also via CMR_CONFIG).")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.pass_context
def main(ctx, config_path, seed):
    """Context-motion scene retrieval pipeline."""
    try:
        cfg = load_config(config_path)
    except CMRetrievalError as exc:
        _fail(str(exc))
    if seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=seed, train=replace(cfg.train, seed=seed))
    ctx.obj = cfg


@main.command("gen-synthetic")
@click.option("--n", type=int, required=True, help="Number of scenes.")
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
@click.option("--distractors", is_flag=True, help="Add a second person per frame.")
@click.pass_obj
def gen_synthetic(cfg: PipelineConfig, n, seed, out, distractors):
    """Generate a labeled synthetic dataset manifest."""
    if n < 1:
        _fail("--n must be >= 1")
    dims = (cfg.data.image_width, cfg.data.image_height)
    samples = generate_dataset(n, seed, image_dims=dims, with_distractors=distractors)
    count = write_manifest(samples, out)
    click.echo(f"wrote {count} scenes to {out}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
def ingest(input_path, output_path):
    """Validate a manifest and write a canonical copy to the store."""
    try:
        count = validate_manifest(input_path, Path(output_path))
    except CMRetrievalError as exc:
        _fail(str(exc))
    click.echo(f"ingested {count} scenes into {output_path}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
@click.pass_obj
def annotate(cfg: PipelineConfig, input_path, output_path):
    """Run the motion and context labelers over a manifest."""
    try:
        samples = load_manifest(input_path)
        labeled = annotate_samples(samples, cfg)
        count = write_manifest(labeled, output_path)
    except CMRetrievalError as exc:
        _fail(str(exc))
    click.echo(f"annotated {count} scenes into {output_path}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--model-out", type=click.Path(), required=True)
@click.option("--history-out", type=click.Path(), default=None)
@click.option("--focus-box/--no-focus-box", default=True,
              help="Draw the person focus box into video frames.")
@click.pass_obj
def train(cfg: PipelineConfig, input_path, model_out, history_out, focus_box):
    """Train the fused embedding on a labeled manifest."""
    try:
        samples = load_manifest(input_path)
        model, result = train_model(samples, cfg, with_focus_box=focus_box)
    except CMRetrievalError as exc:
        _fail(str(exc))
    model.save(model_out)
    if history_out:
        Path(history_out).write_text(json.dumps({"loss": result.history}, indent=2))
    click.echo(
        f"trained on {len(samples)} scenes: loss {result.history[0]:.4f} -> "
        f"{result.history[-1]:.4f}; model saved to {model_out}"
    )


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
def embed(input_path, model_path, output_path):
    """Embed every scene of a manifest into vectors (JSONL)."""
    from .pipeline import scene_metadata

    try:
        model = RetrievalModel.load(model_path)
        samples = load_manifest(input_path)
        vectors = model.embed_scenes(samples)
    except CMRetrievalError as exc:
        _fail(str(exc))
    with open(output_path, "w", encoding="utf-8") as fh:
        for sample, vec in zip(samples, vectors):
            fh.write(json.dumps({
                "id": sample.id,
                "vector": [float(x) for x in vec],
                "metadata": scene_metadata(sample),
            }, sort_keys=True))
            fh.write("\n")
    click.echo(f"embedded {len(samples)} scenes into {output_path}")


@main.command("index")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
def build_index_cmd(input_path, output_path):
    """Build a persistent vector index from embedding JSONL."""
    index = None
    try:
        with open(input_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                row = json.loads(line)
                vec = np.asarray(row["vector"], dtype=np.float64)
                if index is None:
                    index = VectorIndex(vec.shape[0])
                index.insert(row["id"], vec, row.get("metadata"))
    except (CMRetrievalError, KeyError, json.JSONDecodeError) as exc:
        _fail(f"invalid embeddings file: {exc}")
    if index is None:
        _fail("embeddings file is empty")
    index.persist(output_path)
    click.echo(f"indexed {len(index)} vectors into {output_path}")


def _load_serving_state(cfg, model_path, index_path, scenes_path):
    from .service import ServiceState

    model = RetrievalModel.load(model_path)
    index = VectorIndex.load(index_path)
    scenes = {}
    if scenes_path:
        scenes = {s.id: s for s in load_manifest(scenes_path)}
    return ServiceState(config=cfg, model=model, index=index, scenes=scenes)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--index", "index_path", type=click.Path(exists=True), required=True)
@click.option("--scenes", "scenes_path", type=click.Path(exists=True), default=None)
@click.option("--port", type=int, default=None, help="Default 8080 (or CMR_PORT).")
@click.option("--host", default="127.0.0.1")
@click.pass_obj
def serve(cfg: PipelineConfig, model_path, index_path, scenes_path, port, host):
    """Serve the HTTP retrieval API."""
    import uvicorn

    from .service import create_app

    try:
        state = _load_serving_state(cfg, model_path, index_path, scenes_path)
    except CMRetrievalError as exc:
        _fail(str(exc))
    port = port or int(os.environ.get(ENV_PORT, DEFAULT_PORT))
    uvicorn.run(create_app(state), host=host, port=port)


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--index", "index_path", type=click.Path(exists=True), required=True)
@click.option("--text", required=True)
@click.option("--top-n", type=int, default=10)
def query(model_path, index_path, text, top_n):
    """One-shot text query against a persisted index."""
    if not text.strip():
        _fail("--text must be non-empty")
    if top_n < 1:
        _fail("--top-n must be >= 1")
    try:
        model = RetrievalModel.load(model_path)
        index = VectorIndex.load(index_path)
        ranked = index.query_topn(model.encode_text(text), top_n)
    except CMRetrievalError as exc:
        _fail(str(exc))
    click.echo(json.dumps(
        {"results": [{"id": rid, "score": score} for rid, score in ranked]},
        indent=2,
    ))


@main.command("eval")
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Labeled manifest path (alternative to --split).")
@click.option("--split", default=None,
              help="Split name, resolved to <workdir>/<split>.jsonl.")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--protocol", type=click.Choice(["label", "recall"]), default="label")
@click.option("--ks", default="1,2,3,5", help="Comma-separated k values.")
@click.option("--report-out", type=click.Path(), default=None)
@click.pass_obj
def evaluate(cfg: PipelineConfig, input_path, split, model_path, protocol, ks, report_out):
    """Top-k evaluation of a trained model over a labeled manifest."""
    if input_path is None:
        if split is None:
            _fail("provide --input or --split")
        candidate = cfg.paths.resolve(f"{split}.jsonl")
        if not candidate.exists():
            _fail(f"split manifest {candidate} does not exist")
        input_path = str(candidate)
    try:
        k_values = tuple(int(k) for k in ks.split(",") if k)
    except ValueError:
        _fail(f"--ks must be comma-separated integers, got {ks!r}")
    if not k_values or min(k_values) < 1:
        _fail("--ks values must be >= 1")
    try:
        model = RetrievalModel.load(model_path)
        samples = load_manifest(input_path)
        if protocol == "label":
            labels = candidate_labels(samples)
            truth = [first_annotation(s) for s in samples]
            report = topk_label_accuracy(model, samples, truth, labels, k_values)
        else:
            index = build_index(samples, model)
            pairs = [(first_annotation(s), s.id) for s in samples]
            report = recall_at_k(model, index, pairs, k_values)
    except CMRetrievalError as exc:
        _fail(str(exc))
    click.echo(report.table())
    if report_out:
        Path(report_out).write_text(json.dumps(report.as_dict(), indent=2))


if __name__ == "__main__":
    main()
