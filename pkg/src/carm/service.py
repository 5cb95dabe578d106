"""HTTP layer: launch runs, stream generation events, inspect rules.

One worker thread per run; subscribers read a per-run event log guarded
by a condition variable, so any number of event streams can follow one
run without touching the engine. Finished and stopped runs are written
to the output directory and reloaded into the registry on restart.
"""
from __future__ import annotations

import json
import logging
import os
import threading
import time
import uuid
from typing import Dict, List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from . import dataset as ds
from .evolution import ConfigError, RunConfig, run
from .render import render_rule, run_document, true_vector

log = logging.getLogger(__name__)

DEFAULT_PORT = 8077
DEFAULT_MAX_CONCURRENT = 2
TOP_RULES_PER_EVENT = 5
SSE_KEEPALIVE_SECONDS = 15.0

PENDING = "pending"
RUNNING = "running"
STOPPED = "stopped"
FINISHED = "finished"
FAILED = "failed"
TERMINAL = (STOPPED, FINISHED, FAILED)


class LiveRun:
    """Registry entry: lifecycle state plus the event log for streaming."""

    def __init__(self, run_id: str, config: RunConfig):
        self.run_id = run_id
        self.config = config
        self.state = PENDING
        self.events: List[dict] = []
        self.cond = threading.Condition()
        self.stop_requested = False
        self.error: Optional[str] = None
        self.result = None
        self.document: Optional[dict] = None
        self.rule_texts: List[str] = []
        self.generations_done = 0
        self.started = time.time()

    # -- event log --------------------------------------------------------

    def emit(self, kind: str, payload: dict):
        with self.cond:
            self.events.append({"event": kind, "data": payload})
            self.cond.notify_all()

    def set_state(self, state: str):
        with self.cond:
            self.state = state
            self.cond.notify_all()

    def finish(self, state: str, payload: dict):
        # state flip and terminal event must land together, else a stream
        # waiting on the condition can observe the end and miss the event
        with self.cond:
            self.state = state
            self.events.append({"event": "terminal", "data": payload})
            self.cond.notify_all()

    @property
    def terminal(self) -> bool:
        return self.state in TERMINAL

    def handle(self) -> dict:
        front = []
        if self.document is not None:
            front = self.document.get("front", [])
        elif self.events:
            for entry in reversed(self.events):
                if entry["event"] == "generation":
                    front = entry["data"]["front"]
                    break
        return {
            "run_id": self.run_id,
            "state": self.state,
            "dataset": self.config.dataset,
            "progress": {
                "generations_done": self.generations_done,
                "generations_total": self.config.generations,
            },
            "latest_front": front,
            "error": self.error,
        }


class Registry:
    def __init__(self, out_dir: str, max_concurrent: int):
        self.out_dir = out_dir
        self.max_concurrent = max_concurrent
        self.runs: Dict[str, LiveRun] = {}
        self.lock = threading.Lock()
        self.load_persisted()

    # -- lifecycle --------------------------------------------------------

    def launch(self, config: RunConfig) -> LiveRun:
        with self.lock:
            active = sum(1 for r in self.runs.values() if not r.terminal)
            if active >= self.max_concurrent:
                raise OverCapacity(active)
            live = LiveRun(uuid.uuid4().hex[:12], config)
            self.runs[live.run_id] = live
        worker = threading.Thread(
            target=self._work, args=(live,), name=f"run-{live.run_id}", daemon=True
        )
        worker.start()
        return live

    def _work(self, live: LiveRun):
        live.set_state(RUNNING)
        t0 = time.perf_counter()
        try:
            data = ds.resolve_dataset(live.config.dataset)

            def on_generation(rec, beliefs):
                live.generations_done = rec.index + 1
                front_payload = []
                for rid in rec.front:
                    rule = beliefs.rule(rid)
                    vec = beliefs.vector(rid)
                    metrics = {
                        spec.name: (v if spec.maximize else -v) + 0.0
                        for spec, v in zip(live.config.metrics, vec)
                    }
                    front_payload.append({
                        "rule_id": rid,
                        "rule": str(rule),
                        "metrics": metrics,
                    })
                top = [
                    render_rule(beliefs.rule(rid), data)
                    for rid in rec.front[:TOP_RULES_PER_EVENT]
                ]
                live.emit("generation", {
                    "generation": rec.index,
                    "front_size": len(rec.front),
                    "rks_size": rec.rks_count,
                    "front": front_payload,
                    "top_rules": top,
                    "elapsed_ms": (time.perf_counter() - t0) * 1000.0,
                })

            result = run(
                live.config,
                data=data,
                on_generation=on_generation,
                should_stop=lambda: live.stop_requested,
            )
            live.result = result
            live.document = run_document(result)
            live.rule_texts = [
                render_rule(result.beliefs.rule(rid), data)
                for rid in range(result.beliefs.rule_count)
            ]
            state = STOPPED if result.stopped_early else FINISHED
            # persist before the terminal flip: anyone who observes the end
            # must find the run on disk
            self.persist(live, state)
            live.finish(state, {"state": state, "summary": self._summary(live)})
        except ConfigError as exc:
            live.error = "; ".join(f"{f}: {m}" for f, m in exc.errors)
            live.finish(FAILED, {"state": FAILED, "error": live.error})
        except Exception as exc:  # noqa: BLE001 - worker boundary
            log.exception("run %s failed", live.run_id)
            live.error = str(exc)
            live.finish(FAILED, {"state": FAILED, "error": live.error})

    @staticmethod
    def _summary(live: LiveRun) -> dict:
        doc = live.document
        return {
            "run_id": live.run_id,
            "dataset": doc["dataset"],
            "generations_run": doc["generations_run"],
            "stopped_early": doc["stopped_early"],
            "rks_count": doc["rks_count"],
            "hks_count": doc["hks_count"],
            "front_size": len(doc["front"]),
            "accuracy": doc["accuracy"],
            "train_accuracy": doc["train_accuracy"],
            "eval_mode": doc["eval_mode"],
            "elapsed_ms": live.result.total_wall_ms,
        }

    # -- persistence ------------------------------------------------------

    def run_dir(self, run_id: str) -> str:
        return os.path.join(self.out_dir, "runs", run_id)

    def persist(self, live: LiveRun, state: str):
        path = self.run_dir(live.run_id)
        try:
            os.makedirs(path, exist_ok=True)
            doc = {
                "run_id": live.run_id,
                "state": state,
                "document": live.document,
                "rule_texts": live.rule_texts,
                "summary": self._summary(live),
            }
            target = os.path.join(path, "service.json")
            tmp = target + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(doc, fh)
            os.replace(tmp, target)
        except OSError:
            log.exception("cannot persist run %s", live.run_id)

    def load_persisted(self):
        root = os.path.join(self.out_dir, "runs")
        if not os.path.isdir(root):
            return
        for run_id in sorted(os.listdir(root)):
            path = os.path.join(root, run_id, "service.json")
            if not os.path.isfile(path):
                continue
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    doc = json.load(fh)
                config = RunConfig.from_dict(doc["document"]["config"])
                live = LiveRun(doc["run_id"], config)
                live.state = doc["state"]
                live.document = doc["document"]
                live.rule_texts = doc.get("rule_texts", [])
                live.generations_done = doc["document"]["generations_run"]
                live.events.append({
                    "event": "terminal",
                    "data": {"state": doc["state"], "summary": doc["summary"]},
                })
                self.runs[live.run_id] = live
            except (OSError, KeyError, ValueError, ConfigError):
                log.exception("skipping unreadable persisted run at %s", path)


class OverCapacity(RuntimeError):
    def __init__(self, active: int):
        super().__init__(f"{active} runs already active")
        self.active = active


# ---------------------------------------------------------------------------
# HTTP app
# ---------------------------------------------------------------------------


def _error(status: int, errors) -> JSONResponse:
    if isinstance(errors, str):
        errors = [("request", errors)]
    return JSONResponse(
        status_code=status,
        content={"errors": [{"field": f, "message": m} for f, m in errors]},
    )


def _dataset_payload(name: str) -> dict:
    data = ds.load_preset(name)
    counts = data.class_counts()
    return {
        "name": data.name,
        "instances": len(data.instances),
        "population_default": ds.PRESET_POPULATION[name],
        "attributes": [
            {
                "name": meta.name,
                "kind": meta.kind,
                "codes": [
                    {"code": c, "display": meta.display(c)} for c in meta.values
                ],
            }
            for meta in data.attributes
        ],
        "class_attribute": {
            "name": data.class_attribute.name,
            "codes": [
                {
                    "code": c,
                    "display": data.class_attribute.display(c),
                    "instances": counts.get(c, 0),
                }
                for c in data.class_attribute.values
            ],
        },
    }


def _preset_payload(name: str) -> dict:
    cfg = RunConfig(dataset=name, population_size=ds.PRESET_POPULATION[name])
    return cfg.to_dict()


def create_app(
    out_dir: str = "carm-out",
    max_concurrent: int = DEFAULT_MAX_CONCURRENT,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="carm", docs_url=None, redoc_url=None)
    registry = Registry(out_dir, max_concurrent)
    app.state.registry = registry

    @app.post("/api/runs")
    async def create_run(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be JSON")
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        try:
            config = RunConfig.from_dict(body)
        except ConfigError as exc:
            return _error(400, exc.errors)
        try:
            data = ds.resolve_dataset(config.dataset)
        except ds.DatasetError as exc:
            return _error(400, [("dataset", str(exc))])
        errors = config.validate(data)
        if errors:
            return _error(400, errors)
        try:
            live = registry.launch(config)
        except OverCapacity:
            return _error(409, [(
                "runs", f"concurrent run limit ({registry.max_concurrent}) reached"
            )])
        return JSONResponse(status_code=201, content=live.handle())

    def _get(run_id: str) -> Optional[LiveRun]:
        return registry.runs.get(run_id)

    @app.get("/api/runs")
    def list_runs():
        return [live.handle() for live in registry.runs.values()]

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        live = _get(run_id)
        if live is None:
            return _error(404, "unknown run id")
        return live.handle()

    @app.get("/api/runs/{run_id}/events")
    def stream_events(run_id: str):
        live = _get(run_id)
        if live is None:
            return _error(404, "unknown run id")

        def generate():
            # a run that is already over replays only its terminal event
            if live.terminal:
                for entry in reversed(live.events):
                    if entry["event"] == "terminal":
                        yield _sse(entry)
                        return
                return
            cursor = 0
            while True:
                with live.cond:
                    while cursor >= len(live.events):
                        if live.terminal:
                            return
                        notified = live.cond.wait(timeout=SSE_KEEPALIVE_SECONDS)
                        if not notified and cursor >= len(live.events):
                            break
                    pending = live.events[cursor:]
                    cursor = len(live.events)
                if not pending:
                    yield ": keepalive\n\n"
                    continue
                for entry in pending:
                    yield _sse(entry)
                    if entry["event"] == "terminal":
                        return

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/api/runs/{run_id}/stop")
    def stop_run(run_id: str):
        live = _get(run_id)
        if live is None:
            return _error(404, "unknown run id")
        with live.cond:
            if live.terminal:
                return _error(409, f"run is already {live.state}")
            live.stop_requested = True
        return live.handle()

    @app.get("/api/runs/{run_id}/rules")
    def get_rules(run_id: str, all: bool = False):
        live = _get(run_id)
        if live is None:
            return _error(404, "unknown run id")
        if live.document is None:
            return _error(404, "run has no rules yet")
        doc = live.document
        if all:
            return [
                {"rule_id": rid, "rule": rule, "text": text}
                for rid, (rule, text) in enumerate(
                    zip(doc["rules"], live.rule_texts)
                )
            ]
        return doc["front"]

    @app.get("/api/runs/{run_id}/front")
    def get_front(run_id: str):
        live = _get(run_id)
        if live is None:
            return _error(404, "unknown run id")
        if live.document is None:
            return _error(404, "run has no front yet")
        names = live.document["metric_names"]
        return [
            {
                "rule_id": entry["rule_id"],
                "rule": entry["rule"],
                "text": entry["text"],
                "metrics": dict(zip(names, entry["metrics"])),
            }
            for entry in live.document["front"]
        ]

    @app.get("/api/runs/{run_id}/config")
    def get_config(run_id: str):
        live = _get(run_id)
        if live is None:
            return _error(404, "unknown run id")
        return live.config.to_dict()

    @app.get("/api/datasets")
    def datasets():
        return [_dataset_payload(name) for name in ds.PRESET_SCHEMAS]

    @app.get("/api/presets")
    def presets():
        return [_preset_payload(name) for name in ds.PRESET_SCHEMAS]

    if ui_dir is None:
        ui_dir = os.path.join(os.path.dirname(__file__), "ui")
    if os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _sse(entry: dict) -> str:
    return f"event: {entry['event']}\ndata: {json.dumps(entry['data'])}\n\n"


def serve(port: int = DEFAULT_PORT, out_dir: str = "carm-out",
          host: str = "127.0.0.1", max_concurrent: int = DEFAULT_MAX_CONCURRENT):
    import uvicorn

    app = create_app(out_dir=out_dir, max_concurrent=max_concurrent)
    uvicorn.run(app, host=host, port=port, log_level="warning")
