import json

import pytest
from fastapi.testclient import TestClient

from sosim.gateway import create_app
from sosim.scenario import load_scenario

from helpers import demo_scenario_doc


@pytest.fixture()
def app():
    spec = load_scenario(demo_scenario_doc())
    # Drop the scheduled mission so tests drive the gateway themselves.
    spec.missions.clear()
    return create_app(spec, heartbeat_ticks=10)


@pytest.fixture()
def client(app):
    return TestClient(app)


def session(app):
    return app.state.session


def test_submit_mission_by_nodes_and_watch_plan(app, client):
    reply = client.post("/api/missions", json={"origin": "X", "destination": "Y",
                                               "objective": "fastest"})
    assert reply.status_code == 202
    mission_id = reply.json()["mission_id"]
    session(app).step(25)
    state = client.get("/api/state").json()
    assert state["tick"] == 25
    plans = [p for p in state["plans"] if p["mission_id"] == mission_id]
    assert plans, "plan tree missing from snapshot"
    tasks = plans[0]["tasks"]
    # Expanded locomotion legs show up as Composite with a micro sub-plan.
    assert len(tasks) == 5
    assert [t["kind"] for t in tasks].count("Transfer") == 2
    assert any(isinstance(t["sub_plan"], dict) for t in tasks)
    assert {n["id"] for n in state["world"]["nodes"]} >= {"X", "Y"}


def test_submit_mission_by_text(app, client):
    reply = client.post("/api/missions", json={"text": "take me from X to Y, cheapest"})
    assert reply.status_code == 202
    session(app).step(20)
    snapshot = client.get("/api/state").json()
    assert snapshot["missions"]


def test_submit_mission_validation_errors(client):
    assert client.post("/api/missions", json={"origin": "nowhere",
                                              "destination": "Y"}).status_code == 422
    assert client.post("/api/missions", json={"text": "from X to Y",
                                              "origin": "X",
                                              "destination": "Y"}).status_code == 422
    assert client.post("/api/missions", json={}).status_code == 422
    assert client.post("/api/missions", json={"text": "sing me a song"}).status_code == 422
    assert client.post("/api/missions", json={"origin": "X"}).status_code == 422


def test_no_simulation_gives_409():
    bare = TestClient(create_app(None))
    assert bare.post("/api/missions", json={"origin": "X", "destination": "Y"}).status_code == 409
    assert bare.get("/api/state").status_code == 409
    assert bare.get("/api/metrics").status_code == 409


def test_disturbance_injection_and_idempotent_duplicate(app, client):
    reply = client.post("/api/disturbances", json={"kind": "EdgeClosure",
                                                   "target": "E7", "duration": 50})
    assert reply.status_code == 202
    records = session(app).step(1)
    applied = [r for r in records if r.kind.value == "DisturbanceApplied"]
    assert applied and applied[0].body["target"] == "E7"
    state = client.get("/api/state").json()
    assert state["edges"]["E7"] is False
    # Duplicate closure is a no-op on the open flag but still accepted.
    assert client.post("/api/disturbances", json={"kind": "EdgeClosure",
                                                  "target": "E7", "duration": 50}
                       ).status_code == 202
    session(app).step(1)
    assert client.get("/api/state").json()["edges"]["E7"] is False


def test_disturbance_unknown_target_422(client):
    assert client.post("/api/disturbances", json={"kind": "EdgeClosure",
                                                  "target": "E99"}).status_code == 422
    assert client.post("/api/disturbances", json={"kind": "VehicleFailure",
                                                  "target": "m99"}).status_code == 422


def test_plan_endpoint_and_404(app, client):
    client.post("/api/missions", json={"origin": "X", "destination": "Y"})
    session(app).step(10)
    state = client.get("/api/state").json()
    plan_id = state["plans"][0]["plan_id"]
    tree = client.get(f"/api/plans/{plan_id}").json()
    assert tree["plan_id"] == plan_id and tree["tasks"]
    assert client.get("/api/plans/nope").status_code == 404


def test_metrics_endpoint(app, client):
    client.post("/api/missions", json={"origin": "X", "destination": "Y"})
    session(app).step(60)
    doc = client.get("/api/metrics").json()
    assert doc["missions_total"] == 1
    assert doc["missions_done"] == 1


def test_event_stream_order_and_cursor_resume(app, client):
    client.post("/api/missions", json={"origin": "X", "destination": "Y"})
    with client.websocket_connect("/api/events") as ws:
        session(app).step(5)
        seen = []
        while len(seen) < 25:
            seen.append(json.loads(ws.receive_text()))
        keys = [(r["tick"], r["seq"]) for r in seen]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)
        cursor = keys[-1]
    # Reconnect with the cursor: no gaps, no duplicates.
    session(app).step(3)
    with client.websocket_connect(
            f"/api/events?after_tick={cursor[0]}&after_seq={cursor[1]}") as ws:
        nxt = json.loads(ws.receive_text())
        assert (nxt["tick"], nxt["seq"]) > cursor
        assert nxt["seq"] == cursor[1] + 1


def test_idle_heartbeat_metric_samples(app, client):
    records = session(app).step(30)  # heartbeat_ticks=10
    samples = [r for r in records if r.kind.value == "MetricSample"]
    assert len(samples) >= 2


def test_mutations_only_take_effect_at_tick_boundaries(app, client):
    before = client.get("/api/state").json()
    client.post("/api/missions", json={"origin": "X", "destination": "Y"})
    client.post("/api/disturbances", json={"kind": "EdgeClosure", "target": "E5"})
    untouched = client.get("/api/state").json()
    # Nothing changed until the next tick is processed.
    assert untouched["missions"] == before["missions"]
    assert untouched["edges"]["E5"] is True
    assert untouched["tick"] == before["tick"]
    session(app).step(3)
    after = client.get("/api/state").json()
    assert after["edges"]["E5"] is False
    assert after["missions"]
