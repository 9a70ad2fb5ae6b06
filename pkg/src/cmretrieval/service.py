"""HTTP retrieval service: text queries against the vector index.

JSON over HTTP/1.1, no auth (trusted-network tool), CORS enabled for the
explorer UI. Index access follows the reader-writer contract of
VectorIndex; model parameters are immutable while serving.
"""

from __future__ import annotations

import base64
import time
from typing import Dict, Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import PipelineConfig
from .embed.model import RetrievalModel
from .errors import EmptyText, ManifestError
from .index import VectorIndex
from .manifest import sample_from_dict, sample_to_dict
from .pipeline import scene_metadata
from .rle import rle_encode
from .types import SceneSample


class QueryRequest(BaseModel):
    text: str = ""
    top_n: int = 10


class ServiceState:
    """Everything the endpoints need; swapped atomically on reload."""

    def __init__(
        self,
        config: Optional[PipelineConfig] = None,
        model: Optional[RetrievalModel] = None,
        index: Optional[VectorIndex] = None,
        scenes: Optional[Dict[str, SceneSample]] = None,
    ):
        self.config = config or PipelineConfig()
        self.model = model
        self.index = index
        self.scenes = scenes or {}

    @property
    def ready(self) -> bool:
        return self.model is not None and self.index is not None


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="context-motion retrieval service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.retrieval = state

    # FastAPI's own 422 validation responses become 400, matching the
    # documented contract (e.g. top_n of the wrong type).
    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {
            "status": "ok" if state.ready else "degraded",
            "index_size": len(state.index) if state.index is not None else 0,
            "model_version": state.model.version if state.model is not None else None,
        }

    @app.post("/query")
    def query(req: QueryRequest):
        max_n = state.config.service.max_top_n
        if not req.text or not req.text.strip():
            raise HTTPException(status_code=400, detail="query text must be non-empty")
        if not 1 <= req.top_n <= max_n:
            raise HTTPException(
                status_code=400, detail=f"top_n must be in [1, {max_n}]"
            )
        if not state.ready or len(state.index) == 0:
            raise HTTPException(status_code=503, detail="model or index not loaded")
        started = time.perf_counter()
        try:
            vector = state.model.encode_text(req.text)
        except EmptyText as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        ranked = state.index.query_topn(vector, req.top_n)
        latency_ms = 1000.0 * (time.perf_counter() - started)
        return {
            "results": [
                {"id": rid, "score": score, "metadata": state.index.metadata_for(rid)}
                for rid, score in ranked
            ],
            "latency_ms": latency_ms,
        }

    @app.get("/scenes/{scene_id}")
    def scene_detail(scene_id: str, include: Optional[str] = Query(default=None)):
        sample = state.scenes.get(scene_id)
        if sample is None:
            raise HTTPException(status_code=404, detail=f"unknown scene {scene_id!r}")
        detail = scene_metadata(sample)
        detail["ground_truth"] = (
            sample_to_dict(sample)["ground_truth"] if sample.ground_truth else None
        )
        detail["image_dims"] = list(sample.image_dims)
        if include == "masks":
            detail["masks"] = {
                "object": {
                    "rle": base64.b64encode(rle_encode(sample.masks.object_mask)).decode(),
                    "classes": {str(k): v for k, v in sample.masks.object_classes.items()},
                },
                "ground": {
                    "rle": base64.b64encode(rle_encode(sample.masks.ground_mask)).decode(),
                    "classes": {str(k): v for k, v in sample.masks.ground_classes.items()},
                },
            }
        return detail

    @app.post("/scenes", status_code=201)
    def ingest_scene(record: dict):
        try:
            sample = sample_from_dict(record)
        except ManifestError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if not state.ready:
            raise HTTPException(status_code=503, detail="model or index not loaded")
        if sample.id in state.scenes or sample.id in state.index:
            raise HTTPException(status_code=409, detail=f"scene {sample.id!r} exists")
        vector = state.model.embed_scenes([sample])[0]
        state.index.insert(sample.id, vector, scene_metadata(sample))
        state.scenes[sample.id] = sample
        return {"id": sample.id, "index_size": len(state.index)}

    return app
