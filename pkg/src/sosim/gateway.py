"""HTTP/WebSocket gateway exposing a live simulation to clients.

All mutations (mission submissions, disturbance injections) are applied at
tick boundaries: submissions ride the kernel's staged mailboxes and
disturbances are scheduled for the next unprocessed tick, so clients never
observe torn state. The event stream is gapless and duplicate-free; a
reconnecting client passes the (tick, seq) cursor of the last record it
saw and resumes from the very next one.
"""

from __future__ import annotations

import os
import queue
import threading
import time
from typing import Any

import asyncio

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .eventlog import EventKind, EventRecord
from .metrics import compute_metrics
from .reasoning import BackendConfig, EmptyInput, Intent, backend_from_env, preprocess
from .scenario import ScenarioSpec, load_scenario
from .simulation import Simulation
from .world import DisturbanceKind, SchemaError, parse_disturbance

DEFAULT_TICK_RATE = 10.0
DEFAULT_HEARTBEAT_TICKS = 50


class ApiMission(BaseModel):
    text: str | None = None
    origin: str | None = None
    destination: str | None = None
    objective: str | None = None
    human: str | None = None


class ApiDisturbance(BaseModel):
    kind: str
    target: str
    start: int | None = None
    duration: int = 0
    factor: float = 1.0


class SimulationSession:
    """Owns one live simulation; serializes every mutation behind a lock."""

    def __init__(self, spec: ScenarioSpec, coordinator: str = "holonic",
                 backend: BackendConfig | None = None,
                 heartbeat_ticks: int = DEFAULT_HEARTBEAT_TICKS) -> None:
        self.sim = Simulation(spec, coordinator=coordinator, backend=backend)
        self.lock = threading.RLock()
        self.heartbeat_ticks = heartbeat_ticks
        self._subscribers: list[queue.SimpleQueue] = []
        self._last_heartbeat = 0
        self._pacer: threading.Thread | None = None
        self._stop = threading.Event()
        self._publish(self.sim.runtime.log.records)

    # -- stepping -------------------------------------------------------

    def step(self, n: int = 1) -> list[EventRecord]:
        with self.lock:
            fresh: list[EventRecord] = []
            for _ in range(n):
                fresh.extend(self.sim.step(1))
                if self.sim.runtime.clock.now - self._last_heartbeat >= self.heartbeat_ticks:
                    self._last_heartbeat = self.sim.runtime.clock.now
                    fresh.append(self.sim.runtime.log_event(
                        EventKind.METRIC_SAMPLE,
                        compute_metrics(self.sim.runtime.log.records).to_dict()))
            self._publish(fresh)
            return fresh

    def start(self, tick_rate: float = DEFAULT_TICK_RATE) -> None:
        if self._pacer is not None:
            return

        def pace() -> None:
            period = 1.0 / max(tick_rate, 0.001)
            while not self._stop.is_set():
                started = time.monotonic()
                if self.sim.runtime.clock.now < self.sim.spec.horizon:
                    self.step(1)
                self._stop.wait(max(0.0, period - (time.monotonic() - started)))

        self._pacer = threading.Thread(target=pace, name="sosim-pacer", daemon=True)
        self._pacer.start()

    def stop(self) -> None:
        self._stop.set()
        if self._pacer is not None:
            self._pacer.join(timeout=2.0)
            self._pacer = None

    # -- mutations -------------------------------------------------------

    def submit_mission(self, mission: ApiMission) -> str:
        has_text = bool(mission.text)
        has_nodes = bool(mission.origin) or bool(mission.destination)
        if has_text == has_nodes:
            raise HTTPException(422, "provide either text or origin+destination")
        with self.lock:
            world = self.sim.world
            doc: dict[str, Any] = {"human": self._pick_human(mission.human)}
            if has_text:
                try:
                    command = preprocess(mission.text, doc["human"], self.sim.runtime.clock.now)
                except EmptyInput:
                    raise HTTPException(422, "Unparseable: empty text")
                if command.intent is not Intent.TRANSPORT:
                    raise HTTPException(422, f"Unparseable: intent {command.intent.value}")
                if command.origin not in world.nodes or command.destination not in world.nodes:
                    raise HTTPException(422, "UnknownNode in parsed text")
                doc["text"] = mission.text
            else:
                if not (mission.origin and mission.destination):
                    raise HTTPException(422, "origin and destination are both required")
                for node in (mission.origin, mission.destination):
                    if node not in world.nodes:
                        raise HTTPException(422, f"UnknownNode: {node}")
                doc["origin"], doc["destination"] = mission.origin, mission.destination
            if mission.objective:
                doc["objective"] = mission.objective
            try:
                return self.sim.inject_mission(doc)
            except ValueError as exc:
                raise HTTPException(422, str(exc))

    def _pick_human(self, requested: str | None) -> str:
        humans = [h["id"] for h in self.sim.spec.humans]
        if requested:
            if requested not in humans:
                raise HTTPException(422, f"unknown human {requested}")
            return requested
        if not humans:
            raise HTTPException(409, "scenario defines no human resource holon")
        return sorted(humans)[0]

    def inject_disturbance(self, api: ApiDisturbance) -> dict[str, Any]:
        with self.lock:
            start = api.start if api.start is not None else self.sim.runtime.clock.now
            start = max(start, self.sim.runtime.clock.now)
            try:
                d = parse_disturbance({"kind": api.kind, "target": api.target,
                                       "start": start, "duration": api.duration,
                                       "factor": api.factor})
            except SchemaError as exc:
                raise HTTPException(422, str(exc))
            if d.kind is DisturbanceKind.VEHICLE_FAILURE:
                if d.target not in self.sim.vehicles:
                    raise HTTPException(422, f"unknown vehicle {d.target}")
            elif d.target not in self.sim.world.edges:
                raise HTTPException(422, f"unknown edge {d.target}")
            self.sim.inject_disturbance(d)
            return d.body()

    # -- views ---------------------------------------------------------------

    def snapshot(self) -> dict[str, Any]:
        with self.lock:
            return self.sim.snapshot()

    def metrics(self) -> dict[str, Any]:
        with self.lock:
            return compute_metrics(self.sim.runtime.log.records).to_dict()

    def plan_tree(self, plan_id: str) -> dict[str, Any]:
        with self.lock:
            if plan_id not in self.sim.store.plans:
                raise HTTPException(404, f"unknown plan {plan_id}")
            return self.sim.store.tree(plan_id)

    # -- streaming --------------------------------------------------------

    def _publish(self, records: list[EventRecord]) -> None:
        for q in list(self._subscribers):
            for record in records:
                q.put(record)

    def subscribe(self, after_tick: int | None, after_seq: int | None
                  ) -> tuple[list[EventRecord], queue.SimpleQueue]:
        with self.lock:
            q: queue.SimpleQueue = queue.SimpleQueue()
            backlog = self.sim.runtime.log.records
            if after_seq is not None or after_tick is not None:
                cursor = (after_tick if after_tick is not None else -1,
                          after_seq if after_seq is not None else -1)
                backlog = [r for r in backlog if (r.tick, r.seq) > cursor]
            else:
                backlog = list(backlog)
            self._subscribers.append(q)
            return backlog, q

    def unsubscribe(self, q: queue.SimpleQueue) -> None:
        with self.lock:
            if q in self._subscribers:
                self._subscribers.remove(q)


def create_app(scenario: ScenarioSpec | str | None = None,
               coordinator: str = "holonic",
               backend: BackendConfig | None = None,
               heartbeat_ticks: int = DEFAULT_HEARTBEAT_TICKS,
               console_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="sosim gateway")
    if scenario is not None:
        spec = scenario if isinstance(scenario, ScenarioSpec) else load_scenario(scenario)
        backend = backend or backend_from_env()
        app.state.session = SimulationSession(spec, coordinator=coordinator,
                                              backend=backend,
                                              heartbeat_ticks=heartbeat_ticks)
    else:
        app.state.session = None

    def session() -> SimulationSession:
        if app.state.session is None:
            raise HTTPException(409, "NoSimulation")
        return app.state.session

    @app.post("/api/missions", status_code=202)
    def post_mission(mission: ApiMission) -> dict[str, Any]:
        mission_id = session().submit_mission(mission)
        return {"mission_id": mission_id, "status": "accepted"}

    @app.post("/api/disturbances", status_code=202)
    def post_disturbance(api: ApiDisturbance) -> dict[str, Any]:
        return {"scheduled": session().inject_disturbance(api)}

    @app.get("/api/state")
    def get_state() -> dict[str, Any]:
        return session().snapshot()

    @app.get("/api/plans/{plan_id}")
    def get_plan(plan_id: str) -> dict[str, Any]:
        return session().plan_tree(plan_id)

    @app.get("/api/metrics")
    def get_metrics() -> dict[str, Any]:
        return session().metrics()

    @app.websocket("/api/events")
    async def events(ws: WebSocket) -> None:
        sess = app.state.session
        if sess is None:
            await ws.close(code=1008)
            return
        await ws.accept()
        params = ws.query_params
        after_tick = int(params["after_tick"]) if "after_tick" in params else None
        after_seq = int(params["after_seq"]) if "after_seq" in params else None
        backlog, q = sess.subscribe(after_tick, after_seq)
        try:
            for record in backlog:
                await ws.send_text(record.to_line())
            while True:
                try:
                    record = q.get_nowait()
                except queue.Empty:
                    await asyncio.sleep(0.02)
                    continue
                await ws.send_text(record.to_line())
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            sess.unsubscribe(q)

    console = console_dir or os.environ.get("SOSIM_CONSOLE_DIR")
    if console is None and os.path.isfile(os.path.join("frontend", "index.html")):
        console = "frontend"
    if console and os.path.isfile(os.path.join(console, "index.html")):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=console, html=True), name="console")

    return app


def serve(scenario_path: str, port: int = 8000, host: str = "127.0.0.1",
          coordinator: str = "holonic", tick_rate: float | None = None) -> None:
    """Run the gateway under uvicorn with the wall-clock pacer started."""
    import uvicorn

    rate = tick_rate if tick_rate is not None else float(
        os.environ.get("SOSIM_TICK_RATE", DEFAULT_TICK_RATE))
    app = create_app(scenario_path, coordinator=coordinator)
    app.state.session.start(tick_rate=rate)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        app.state.session.stop()
