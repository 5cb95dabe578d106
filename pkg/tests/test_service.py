"""HTTP endpoint contracts: launch, streaming, stop, persistence."""
import json
import time

import pytest
from fastapi.testclient import TestClient

from carm.evolution import RunConfig, run
from carm.render import run_document
from carm.service import create_app

TERMINAL = ("stopped", "finished", "failed")

SHORT = {"dataset": "iris", "population_size": 20, "generations": 4, "rng_seed": 2}


@pytest.fixture()
def client(tmp_path):
    app = create_app(out_dir=str(tmp_path / "svc"))
    with TestClient(app) as c:
        yield c


def sse_events(client, run_id):
    """Parsed (event, data) pairs until the stream closes."""
    events = []
    with client.stream("GET", f"/api/runs/{run_id}/events") as resp:
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/event-stream")
        buf = ""
        for chunk in resp.iter_text():
            buf += chunk
        for block in buf.split("\n\n"):
            block = block.strip()
            if not block or block.startswith(":"):
                continue
            fields = dict(line.split(": ", 1) for line in block.split("\n"))
            events.append((fields["event"], json.loads(fields["data"])))
    return events


def wait_terminal(client, run_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        state = client.get(f"/api/runs/{run_id}").json()["state"]
        if state in TERMINAL:
            return state
        time.sleep(0.02)
    raise AssertionError("run did not reach a terminal state")


# -- form-building endpoints ------------------------------------------------

def test_datasets_endpoint(client):
    payload = client.get("/api/datasets").json()
    assert [d["name"] for d in payload] == ["iris", "ljb", "wbc"]
    iris = payload[0]
    assert iris["instances"] == 150
    assert iris["population_default"] == 200
    first = iris["attributes"][0]
    assert first["name"] == "sepal_length"
    assert first["codes"][0] == {"code": 1, "display": "(-inf,5.5]"}
    cls = iris["class_attribute"]
    assert {c["code"] for c in cls["codes"]} == {"IS", "IV", "IVG"}
    assert all(c["instances"] == 50 for c in cls["codes"])


def test_presets_endpoint(client):
    payload = client.get("/api/presets").json()
    assert [(p["dataset"], p["population_size"]) for p in payload] == [
        ("iris", 200), ("ljb", 300), ("wbc", 500),
    ]
    for p in payload:
        # a preset is a complete config the form can load verbatim
        RunConfig.from_dict(p)


# -- launching --------------------------------------------------------------

def test_create_run_and_finish(client):
    r = client.post("/api/runs", json=SHORT)
    assert r.status_code == 201
    handle = r.json()
    # tiny runs may already be done by the time the handle is read
    assert handle["state"] in ("pending", "running", "finished")
    assert handle["dataset"] == "iris"
    rid = handle["run_id"]
    assert wait_terminal(client, rid) == "finished"
    done = client.get(f"/api/runs/{rid}").json()
    assert done["progress"] == {"generations_done": 4, "generations_total": 4}
    assert done["latest_front"]


def test_create_run_rejects_bad_json(client):
    r = client.post("/api/runs", content=b"not json",
                    headers={"content-type": "application/json"})
    assert r.status_code == 400
    r = client.post("/api/runs", json=[1, 2])
    assert r.status_code == 400


def test_create_run_field_errors(client):
    r = client.post("/api/runs", json={"dataset": "iris", "bogus_key": 1})
    assert r.status_code == 400
    errs = r.json()["errors"]
    assert errs == [{"field": "bogus_key",
                     "message": "unknown configuration key 'bogus_key'"}]
    r = client.post("/api/runs", json={"dataset": "iris", "generations": 0,
                                       "crossover_rate": 2.0})
    assert r.status_code == 400
    fields = {e["field"] for e in r.json()["errors"]}
    assert fields == {"generations", "crossover_rate"}
    r = client.post("/api/runs", json={"dataset": "not-a-dataset"})
    assert r.status_code == 400
    assert r.json()["errors"][0]["field"] == "dataset"


def test_create_run_validates_schema_against_data(client):
    cfg = dict(SHORT, schema={"pattern": [1, 2]})
    r = client.post("/api/runs", json=cfg)
    assert r.status_code == 400
    assert r.json()["errors"][0]["field"] == "schema"


def test_concurrency_limit_rejects_not_queues(tmp_path):
    app = create_app(out_dir=str(tmp_path / "svc"), max_concurrent=1)
    with TestClient(app) as client:
        slow = {"dataset": "iris", "population_size": 20,
                "generations": 4000, "rng_seed": 1}
        first = client.post("/api/runs", json=slow)
        assert first.status_code == 201
        second = client.post("/api/runs", json=SHORT)
        assert second.status_code == 409
        assert second.json()["errors"][0]["field"] == "runs"
        # the rejected run never appears in the registry
        assert len(client.get("/api/runs").json()) == 1
        rid = first.json()["run_id"]
        client.post(f"/api/runs/{rid}/stop")
        wait_terminal(client, rid)
        third = client.post("/api/runs", json=SHORT)
        assert third.status_code == 201
        wait_terminal(client, third.json()["run_id"])


# -- event stream -----------------------------------------------------------

def test_events_cover_every_generation_in_order(client):
    # long enough that the stream attaches while the run is still live;
    # replay-from-zero then guarantees complete coverage
    gens = 800
    cfg = dict(SHORT, generations=gens)
    rid = client.post("/api/runs", json=cfg).json()["run_id"]
    events = sse_events(client, rid)
    kinds = [k for k, _ in events]
    assert kinds == ["generation"] * gens + ["terminal"]
    assert [p["generation"] for k, p in events[:-1]] == list(range(gens))
    gen0 = events[0][1]
    assert set(gen0) == {"generation", "front_size", "rks_size", "front",
                         "top_rules", "elapsed_ms"}
    assert gen0["front_size"] == len(gen0["front"])
    assert gen0["rks_size"] > 0
    for entry in gen0["front"]:
        assert set(entry) == {"rule_id", "rule", "metrics"}
        assert set(entry["metrics"]) == {"coverage", "confidence",
                                         "interest", "surprise"}
    assert all(r.startswith("IF ") for r in gen0["top_rules"])
    term = events[-1][1]
    assert term["state"] == "finished"
    summary = term["summary"]
    assert summary["generations_run"] == gens
    assert not summary["stopped_early"]
    assert 0.0 <= summary["accuracy"] <= 1.0
    assert summary["elapsed_ms"] > 0


def test_late_join_gets_single_terminal_event(client):
    rid = client.post("/api/runs", json=SHORT).json()["run_id"]
    wait_terminal(client, rid)
    events = sse_events(client, rid)
    assert [k for k, _ in events] == ["terminal"]


def test_events_unknown_run(client):
    assert client.get("/api/runs/zzz/events").status_code == 404


# -- stop -------------------------------------------------------------------

def test_stop_at_generation_boundary(client):
    slow = {"dataset": "iris", "population_size": 20,
            "generations": 4000, "rng_seed": 3}
    rid = client.post("/api/runs", json=slow).json()["run_id"]
    time.sleep(0.15)
    r = client.post(f"/api/runs/{rid}/stop")
    assert r.status_code == 200
    assert wait_terminal(client, rid) == "stopped"
    handle = client.get(f"/api/runs/{rid}").json()
    done = handle["progress"]["generations_done"]
    assert 0 < done < 4000
    # the partial run still serves a front and a summary with accuracy
    front = client.get(f"/api/runs/{rid}/front").json()
    assert front
    events = sse_events(client, rid)
    assert events[-1][1]["summary"]["stopped_early"] is True


def test_stop_terminal_conflicts(client):
    rid = client.post("/api/runs", json=SHORT).json()["run_id"]
    wait_terminal(client, rid)
    r = client.post(f"/api/runs/{rid}/stop")
    assert r.status_code == 409
    assert client.post("/api/runs/zzz/stop").status_code == 404


# -- rules and front --------------------------------------------------------

@pytest.fixture()
def finished(client):
    rid = client.post("/api/runs", json=SHORT).json()["run_id"]
    wait_terminal(client, rid)
    return rid


def test_front_payload(client, finished):
    front = client.get(f"/api/runs/{finished}/front").json()
    assert front
    for entry in front:
        assert set(entry) == {"rule_id", "rule", "text", "metrics"}
        assert set(entry["metrics"]) == {"coverage", "confidence",
                                         "interest", "surprise"}
        assert entry["text"].startswith("IF ")


def test_rules_all_versus_front(client, finished):
    front = client.get(f"/api/runs/{finished}/rules").json()
    everything = client.get(f"/api/runs/{finished}/rules?all=true").json()
    doc = client.get(f"/api/runs/{finished}").json()
    assert len(front) == len(doc["latest_front"])
    assert len(everything) >= len(front)
    assert [e["rule_id"] for e in everything] == list(range(len(everything)))
    for entry in everything:
        assert entry["text"].startswith("IF ")
    assert client.get("/api/runs/zzz/rules").status_code == 404
    assert client.get("/api/runs/zzz/front").status_code == 404


def test_service_matches_direct_engine_run(client, finished):
    """The HTTP layer must not change results: same config, same outcome."""
    cfg = client.get(f"/api/runs/{finished}/config").json()
    direct = run(RunConfig.from_dict(cfg))
    doc = run_document(direct)
    front = client.get(f"/api/runs/{finished}/front").json()
    assert [e["rule_id"] for e in front] == [e["rule_id"] for e in doc["front"]]
    for served, computed in zip(front, doc["front"]):
        assert served["rule"] == computed["rule"]
        assert list(served["metrics"].values()) == computed["metrics"]
    summary = sse_events(client, finished)[-1][1]["summary"]
    assert summary["accuracy"] == doc["accuracy"]
    assert summary["rks_count"] == doc["rks_count"]


# -- persistence ------------------------------------------------------------

def test_finished_runs_survive_restart(tmp_path):
    out = str(tmp_path / "svc")
    with TestClient(create_app(out_dir=out)) as client:
        rid = client.post("/api/runs", json=SHORT).json()["run_id"]
        wait_terminal(client, rid)
        front_before = client.get(f"/api/runs/{rid}/front").json()
        rules_before = client.get(f"/api/runs/{rid}/rules?all=true").json()

    with TestClient(create_app(out_dir=out)) as reloaded:
        handle = reloaded.get(f"/api/runs/{rid}").json()
        assert handle["state"] == "finished"
        assert reloaded.get(f"/api/runs/{rid}/front").json() == front_before
        assert reloaded.get(f"/api/runs/{rid}/rules?all=true").json() == rules_before
        events = sse_events(reloaded, rid)
        assert [k for k, _ in events] == ["terminal"]
        # a reloaded registry accepts new work
        rid2 = reloaded.post("/api/runs", json=SHORT).json()["run_id"]
        assert wait_terminal(reloaded, rid2) == "finished"


def test_stopped_runs_survive_restart(tmp_path):
    out = str(tmp_path / "svc")
    slow = {"dataset": "iris", "population_size": 20,
            "generations": 4000, "rng_seed": 5}
    with TestClient(create_app(out_dir=out)) as client:
        rid = client.post("/api/runs", json=slow).json()["run_id"]
        time.sleep(0.1)
        client.post(f"/api/runs/{rid}/stop")
        assert wait_terminal(client, rid) == "stopped"

    with TestClient(create_app(out_dir=out)) as reloaded:
        assert reloaded.get(f"/api/runs/{rid}").json()["state"] == "stopped"
        assert reloaded.get(f"/api/runs/{rid}/front").json()


def test_corrupt_persisted_run_is_skipped(tmp_path):
    out = tmp_path / "svc"
    bad = out / "runs" / "deadbeef"
    bad.mkdir(parents=True)
    (bad / "service.json").write_text("{broken")
    with TestClient(create_app(out_dir=str(out))) as client:
        assert client.get("/api/runs").json() == []


# -- static UI --------------------------------------------------------------

def test_static_ui_mount(tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>t</title>ui here")
    app = create_app(out_dir=str(tmp_path / "svc"), ui_dir=str(ui))
    with TestClient(app) as client:
        r = client.get("/")
        assert r.status_code == 200
        assert "ui here" in r.text
        # API routes still win over the static mount
        assert client.get("/api/presets").status_code == 200
