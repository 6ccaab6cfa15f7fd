"""HTTP API backing the web UI: weight proposal, experiment launch, polling.

Experiments run on worker threads; the registry is the only shared mutable
structure and every read or write of a record happens under its lock, so
concurrent experiments cannot interleave state.
"""
from __future__ import annotations

import hashlib
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request, Response

from .backends import SyntheticSpec, TraceBackend, generate_synthetic, load_trace
from .canonical import canonical_json
from .core import (
    ConfigError,
    ExperimentConfig,
    MetricWeights,
    ModelPickError,
    load_pool,
)
from .engine import run_repetitions
from .reasoning import client_from_env, propose_weights
from .reporting import serialize_report

POLL_PROGRESS_SLICES = 20  # progress callbacks per repetition


class FixtureStore:
    """Named pool/trace fixtures, idempotent by name + content digest."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}

    def put(self, name: str, text: str) -> dict:
        digest = hashlib.sha256(text.encode()).hexdigest()
        with self._lock:
            existing = self._entries.get(name)
            if existing is not None and existing["sha256"] == digest:
                return existing["meta"]
        stripped = text.lstrip()
        first_line = text.splitlines()[0].strip() if text.strip() else ""
        if stripped.startswith("[") or first_line.startswith("id,"):
            pool = load_pool(text)
            entry = {
                "kind": "pool",
                "sha256": digest,
                "pool": pool,
                "meta": {"name": name, "kind": "pool", "sha256": digest, "models": len(pool)},
            }
        elif first_line.startswith("model_id,"):
            table, dataset = load_trace(text)
            entry = {
                "kind": "trace",
                "sha256": digest,
                "table": table,
                "dataset": dataset,
                "meta": {
                    "name": name,
                    "kind": "trace",
                    "sha256": digest,
                    "entries": len(table),
                    "samples": len(dataset),
                },
            }
        else:
            raise ModelPickError(
                "fixture is neither a pool file (JSON array / id,... CSV) nor a trace CSV"
            )
        with self._lock:
            self._entries[name] = entry
        return entry["meta"]

    def get(self, name: str) -> dict | None:
        with self._lock:
            return self._entries.get(name)

    def names(self) -> list[dict]:
        with self._lock:
            return [e["meta"] for e in self._entries.values()]


class ExperimentRecord:
    """Mutable run record; all access goes through `snapshot` / the worker."""

    def __init__(self, exp_id: str, config: ExperimentConfig, pool):
        self.lock = threading.Lock()
        self.id = exp_id
        self.config = config
        self.pool = pool
        self.status = "pending"
        self.pulls_completed = 0
        self.pulls_budget = config.budget * config.repetitions
        self.repetitions_done = 0
        self.error: str | None = None
        self.report = None
        # cumulative per-arm sums over completed repetitions
        k = len(pool)
        self._value_sum = [0.0] * k
        self._accuracy_sum = [0.0] * k
        self._pulls = [0] * k
        self._eval_savings_sum = 0.0
        self._compute_savings_sum = 0.0

    def on_progress(self, pulls: int) -> None:
        with self.lock:
            self.pulls_completed = max(self.pulls_completed, pulls)

    def on_report(self, index: int, report) -> None:
        with self.lock:
            for entry in report.ranking:
                self._value_sum[entry.arm] += entry.estimated_value
                self._accuracy_sum[entry.arm] += entry.accuracy
                self._pulls[entry.arm] += entry.pulls
            self._eval_savings_sum += report.eval_savings
            self._compute_savings_sum += report.compute_savings_mmac
            self.repetitions_done = index + 1

    def _progress(self) -> float:
        if self.pulls_budget <= 0:
            return 1.0 if self.status in ("done", "failed") else 0.0
        return min(1.0, self.pulls_completed / self.pulls_budget)

    def snapshot(self) -> dict:
        with self.lock:
            done = self.repetitions_done
            leaderboard = []
            if done > 0:
                rows = [
                    {
                        "arm": arm,
                        "id": cand.id,
                        "estimated_value": self._value_sum[arm] / done,
                        "accuracy": self._accuracy_sum[arm] / done,
                        "pulls": self._pulls[arm],
                        "size_mb": cand.size_mb,
                        "complexity_mmac": cand.complexity_mmac,
                    }
                    for arm, cand in enumerate(self.pool)
                ]
                rows.sort(key=lambda r: (-r["estimated_value"], r["arm"]))
                leaderboard = rows
            return {
                "id": self.id,
                "status": self.status,
                "progress": self._progress(),
                "pulls_completed": self.pulls_completed,
                "pulls_budget": self.pulls_budget,
                "repetitions_done": done,
                "repetitions": self.config.repetitions,
                "leaderboard": leaderboard,
                "eval_savings": self._eval_savings_sum / done if done else None,
                "compute_savings_mmac": self._compute_savings_sum / done if done else None,
                "report": self.report.as_dict() if self.report is not None else None,
                "error": self.error,
            }


def _canonical_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, message: str, field: str | None = None) -> Response:
    payload = {"error": message}
    if field:
        payload["field"] = field
    return _canonical_response(payload, status_code)


def _parse_experiment_request(body: dict, store: FixtureStore):
    """Returns (config, pool, backend, table, dataset) or raises/returns a Response."""
    if not isinstance(body, dict):
        return _error(400, "request body must be an object", "body")
    weights_raw = body.get("weights")
    if not isinstance(weights_raw, dict):
        return _error(400, "weights object is required", "weights")
    try:
        weights = MetricWeights(
            accuracy=float(weights_raw.get("accuracy", 0.0)),
            size=float(weights_raw.get("size", 0.0)),
            complexity=float(weights_raw.get("complexity", 0.0)),
        )
    except (ConfigError, TypeError, ValueError) as exc:
        return _error(400, f"invalid weights: {exc}", "weights")
    try:
        config = ExperimentConfig(
            strategy=str(body.get("strategy", "")),
            budget=body.get("budget", -1),
            weights=weights,
            seed=body.get("seed", 0),
            epsilon=float(body.get("epsilon", 0.1)),
            repetitions=body.get("repetitions", 1),
        )
    except ConfigError as exc:
        return _error(400, str(exc), exc.field)
    except (TypeError, ValueError) as exc:
        return _error(400, f"invalid configuration: {exc}", "config")

    synthetic = body.get("synthetic_spec")
    pool_ref = body.get("pool_ref")
    trace_ref = body.get("trace_ref")
    if synthetic is not None:
        if not isinstance(synthetic, dict):
            return _error(400, "synthetic_spec must be an object", "synthetic_spec")
        try:
            spec = SyntheticSpec(
                n_samples=int(synthetic.get("samples", 0)),
                seed=int(synthetic.get("seed", 0)),
                n_arms=int(synthetic["arms"]) if "arms" in synthetic else None,
                accuracies=tuple(float(p) for p in synthetic["accuracies"])
                if "accuracies" in synthetic
                else None,
            )
            fixture = generate_synthetic(spec)
        except (ModelPickError, TypeError, ValueError, KeyError) as exc:
            return _error(400, f"invalid synthetic_spec: {exc}", "synthetic_spec")
        return config, fixture.pool, fixture.backend(), fixture.table, fixture.dataset
    if not pool_ref or not trace_ref:
        return _error(
            400, "either synthetic_spec or both pool_ref and trace_ref are required", "pool_ref"
        )
    pool_entry = store.get(str(pool_ref))
    if pool_entry is None or pool_entry["kind"] != "pool":
        return _error(404, f"unknown pool fixture {pool_ref!r}", "pool_ref")
    trace_entry = store.get(str(trace_ref))
    if trace_entry is None or trace_entry["kind"] != "trace":
        return _error(404, f"unknown trace fixture {trace_ref!r}", "trace_ref")
    pool = pool_entry["pool"]
    table, dataset = trace_entry["table"], trace_entry["dataset"]
    return config, pool, TraceBackend(pool, table, dataset), table, dataset


def create_app(
    fixtures_dir: str | None = None,
    persist_dir: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="modelpick service")
    store = FixtureStore()
    registry: dict[str, ExperimentRecord] = {}
    registry_lock = threading.Lock()

    if fixtures_dir:
        for path in sorted(Path(fixtures_dir).iterdir()):
            if path.is_file():
                store.put(path.name, path.read_text(encoding="utf-8"))

    @app.post("/api/reason")
    async def reason(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be JSON", "body")
        prompt = body.get("prompt") if isinstance(body, dict) else None
        if not prompt or not isinstance(prompt, str):
            return _error(400, "prompt must be a nonempty string", "prompt")
        samples = body.get("samples", 1)
        offline = bool(body.get("offline", False))
        allow_fallback = bool(body.get("allow_fallback", True))
        if not isinstance(samples, int) or samples < 1:
            return _error(400, "samples must be a positive integer", "samples")
        client = None if offline else client_from_env()
        try:
            proposal = propose_weights(prompt, n_samples=samples, client=client)
        except ModelPickError as exc:
            return _error(400, str(exc))
        if proposal.provenance == "fallback" and not offline and not allow_fallback:
            return _error(502, "LLM client unavailable and fallback disabled")
        return _canonical_response(proposal.as_dict())

    @app.put("/api/fixtures/{name}")
    async def put_fixture(name: str, request: Request):
        text = (await request.body()).decode("utf-8")
        try:
            meta = store.put(name, text)
        except ModelPickError as exc:
            return _error(400, str(exc), "body")
        return _canonical_response(meta)

    @app.get("/api/fixtures")
    async def list_fixtures():
        return _canonical_response({"fixtures": store.names()})

    @app.post("/api/experiments")
    async def create_experiment(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be JSON", "body")
        parsed = _parse_experiment_request(body, store)
        if isinstance(parsed, Response):
            return parsed
        config, pool, backend, table, dataset = parsed
        exp_id = uuid.uuid4().hex
        record = ExperimentRecord(exp_id, config, pool)
        with registry_lock:
            registry[exp_id] = record

        def work():
            with record.lock:
                record.status = "running"
            try:
                result = run_repetitions(
                    config,
                    pool,
                    backend,
                    table=table,
                    dataset=dataset,
                    on_progress=record.on_progress,
                    on_report=record.on_report,
                    progress_every=max(1, config.budget // POLL_PROGRESS_SLICES),
                )
                with record.lock:
                    record.report = result
                    record.status = "done"
                if persist_dir:
                    out = Path(persist_dir)
                    out.mkdir(parents=True, exist_ok=True)
                    (out / f"{exp_id}.json").write_text(
                        canonical_json(record.snapshot()), encoding="utf-8"
                    )
            except Exception as exc:  # failure lands in the record, not the log
                with record.lock:
                    record.status = "failed"
                    record.error = f"{type(exc).__name__}: {exc}"

        threading.Thread(target=work, daemon=True).start()
        return _canonical_response({"id": exp_id}, status_code=202)

    def _get_record(exp_id: str) -> ExperimentRecord | None:
        with registry_lock:
            return registry.get(exp_id)

    @app.get("/api/experiments/{exp_id}")
    async def get_experiment(exp_id: str):
        record = _get_record(exp_id)
        if record is None:
            return _error(404, f"unknown experiment {exp_id!r}")
        return _canonical_response(record.snapshot())

    @app.get("/api/experiments/{exp_id}/report")
    async def get_report(exp_id: str):
        record = _get_record(exp_id)
        if record is None:
            return _error(404, f"unknown experiment {exp_id!r}")
        with record.lock:
            status, report = record.status, record.report
        if status != "done" or report is None:
            return _error(409, f"experiment is {status}; report available once done")
        return Response(content=serialize_report(report), media_type="application/json")

    @app.delete("/api/experiments/{exp_id}")
    async def cancel_experiment(exp_id: str):
        return _error(501, "experiment cancellation is not supported")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
