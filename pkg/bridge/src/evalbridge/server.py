"""The wire-protocol server: GET /models, POST /evaluate (+ GET /samples).

Inference runs in deterministic single-threaded mode and is serialized by a
lock, so identical requests always produce identical responses. With a dump
path configured, every served (model, sample, correct) row is appended to a
trace CSV that replays exactly through a cached-trace backend.
"""
from __future__ import annotations

import json
import threading
from pathlib import Path

import numpy as np
import torch
from fastapi import FastAPI, Request, Response

from .data import load_labeled_images
from .models import build_model
from .profiler import count_mmacs

TRACE_HEADER = "model_id,sample_id,correct"


class ModelZoo:
    """Loaded models plus the labeled target images they are judged on."""

    def __init__(self, model_dir: Path, image_dir: Path, dump_trace: Path | None = None):
        torch.set_num_threads(1)
        torch.use_deterministic_algorithms(True)
        manifest = json.loads((Path(model_dir) / "manifest.json").read_text(encoding="utf-8"))
        self.records = manifest["models"]
        self.models = {}
        for record in self.records:
            model = build_model(record["id"])
            state = torch.load(Path(model_dir) / f"{record['id']}.pt", weights_only=True)
            model.load_state_dict(state)
            model.eval()
            self.models[record["id"]] = model
        ids, images, labels = load_labeled_images(image_dir)
        self.sample_ids = ids
        self.sample_index = {sid: i for i, sid in enumerate(ids)}
        self.images = torch.from_numpy(images)
        self.labels = labels
        self._lock = threading.Lock()
        self._prediction_cache: dict[str, np.ndarray] = {}
        self._dump_path = Path(dump_trace) if dump_trace else None
        self._dumped: set[tuple[str, str]] = set()
        if self._dump_path:
            self._dump_path.parent.mkdir(parents=True, exist_ok=True)
            self._dump_path.write_text(TRACE_HEADER + "\n", encoding="utf-8")

    def pool_records(self) -> list[dict]:
        return [
            {
                "id": r["id"],
                "benchmark_accuracy": r["benchmark_accuracy"],
                "size_mb": r["size_mb"],
                "complexity_mmac": r["complexity_mmac"],
                "source": r["source"],
            }
            for r in self.records
        ]

    def _predictions(self, model_id: str) -> np.ndarray:
        cached = self._prediction_cache.get(model_id)
        if cached is None:
            with torch.no_grad():
                logits = self.models[model_id](self.images)
            cached = logits.argmax(dim=1).numpy()
            self._prediction_cache[model_id] = cached
        return cached

    def evaluate(self, model_id: str, sample_ids: list[str]) -> list[dict]:
        with self._lock:  # one inference at a time, and a consistent dump file
            predictions = self._predictions(model_id)
            results = []
            rows = []
            for sid in sample_ids:
                idx = self.sample_index[sid]
                correct = int(predictions[idx] == self.labels[idx])
                results.append({"sample_id": sid, "correct": correct})
                if self._dump_path and (model_id, sid) not in self._dumped:
                    self._dumped.add((model_id, sid))
                    rows.append(f"{model_id},{sid},{correct}")
            if self._dump_path and rows:
                with open(self._dump_path, "a", encoding="utf-8") as fh:
                    fh.write("\n".join(rows) + "\n")
            return results


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(payload, indent=2, sort_keys=True) + "\n",
        status_code=status_code,
        media_type="application/json",
    )


def create_app(model_dir, image_dir, dump_trace=None) -> FastAPI:
    zoo = ModelZoo(Path(model_dir), Path(image_dir), dump_trace)
    app = FastAPI(title="evalbridge")
    app.state.zoo = zoo

    @app.get("/models")
    async def models():
        return _json_response(zoo.pool_records())

    @app.get("/samples")
    async def samples():
        return _json_response({"samples": zoo.sample_ids})

    @app.post("/evaluate")
    async def evaluate(request: Request):
        try:
            body = json.loads(await request.body())
            model_id = body["model_id"]
            sample_ids = body["sample_ids"]
        except (ValueError, KeyError, TypeError):
            return _json_response({"error": "body must carry model_id and sample_ids"}, 400)
        if model_id not in zoo.models:
            return _json_response({"error": f"unknown model {model_id!r}"}, 404)
        for sid in sample_ids:
            if sid not in zoo.sample_index:
                return _json_response({"error": f"unknown sample {sid!r}"}, 404)
        return _json_response({"results": zoo.evaluate(model_id, list(sample_ids))})

    return app
