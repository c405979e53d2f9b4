"""Simulation orchestration: wires the kernel, world, and role behaviors.

A Simulation owns the world state and the runtime and is the ``env``
handle behaviors see. Scheduled missions and disturbances enter strictly
at tick boundaries; the holonic coordinator spawns the supervisor
hierarchy while the centralized coordinator spawns a single monolithic
dispatcher instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .eventlog import EventKind, EventRecord
from .kernel import HolonContext, HolonDescriptor, HolonRole, HolonStatus, Runtime
from .plans import PlanStore
from .reasoning import (
    BackendConfig,
    Command,
    Decision,
    build_context,
    decide,
)
from .roles.governance import GovernanceMode
from .roles.resource import HumanAgent, VehicleAgent
from .roles.supervisor import CsSupervisor, SosSupervisor
from .scenario import ScenarioSpec
from .world import (
    DisturbanceBook,
    VehicleClass,
    VehicleState,
    load_world,
)

_STORE_KINDS = {
    "PlanCreated": EventKind.PLAN_CREATED,
    "TaskStatusChanged": EventKind.TASK_STATUS_CHANGED,
    "StateChanged": EventKind.STATE_CHANGED,
}


@dataclass
class SimOptions:
    bid_window: int = 3
    report_interval_busy: int = 1
    report_interval_idle: int = 5
    energy_rate: float = 1.0
    history_k: int = 4
    context_budget: int = 4000

    @staticmethod
    def from_dict(doc: dict[str, Any]) -> "SimOptions":
        known = {k: v for k, v in doc.items() if k in SimOptions.__dataclass_fields__}
        return SimOptions(**known)


class Simulation:
    """One deterministic run: world + runtime + schedules, stepped in ticks."""

    def __init__(self, spec: ScenarioSpec, coordinator: str = "holonic",
                 backend: BackendConfig | None = None) -> None:
        if coordinator not in ("holonic", "centralized"):
            raise ValueError(f"unknown coordinator {coordinator!r}")
        self.spec = spec
        self.coordinator = coordinator
        self.world = load_world(spec.world_doc)
        self.options = SimOptions.from_dict(spec.options)
        self.governance: GovernanceMode = spec.governance
        self.backend = backend or BackendConfig()
        self.runtime = Runtime(env=self)
        self.store = PlanStore(emit=self._emit_store_event)
        self.vehicles: dict[str, VehicleState] = {}
        self.cs_of: dict[str, str] = {}
        self.fleet_of: dict[str, list[str]] = {}
        self.vehicle_queue: dict[str, list[str]] = {}
        self.passengers: dict[str, dict[str, Any]] = {}
        self.sos_id: str = spec.supervisors["sos"]
        self._mission_seq = 0
        self._book = DisturbanceBook()
        self._mission_schedule = list(spec.missions)
        self._disturbance_schedule = list(spec.disturbances)
        self._finalized = False
        self._build()

    # -- construction ---------------------------------------------------

    def _build(self) -> None:
        spec = self.spec
        self.runtime.log_event(EventKind.STATE_CHANGED, {
            "entity": "run", "change": "run_started", "scenario": spec.name,
            "governance": self.governance.value, "seed": spec.seed,
            "horizon": spec.horizon, "coordinator": self.coordinator,
        })
        for v in spec.vehicles:
            state = VehicleState(
                id=v["id"], vclass=VehicleClass(v["class"]), at_node=v["at"],
                energy=float(v.get("energy", 1000.0)),
            )
            self.vehicles[state.id] = state
            self.vehicle_queue[state.id] = []
            self.cs_of[state.id] = v.get("cs") or self.sos_id
            self.runtime.log_event(EventKind.STATE_CHANGED, {
                "entity": state.id, "change": "vehicle_registered",
                "class": state.vclass.value, "at": state.at_node,
                "cs": self.cs_of[state.id],
            })

        if self.coordinator == "holonic":
            self.runtime.spawn_holon(
                HolonDescriptor(id=self.sos_id, role=HolonRole.SUPERVISOR),
                SosSupervisor())
            for cs_id in spec.supervisors.get("cs", []):
                fleet = [vid for vid, owner in self.cs_of.items() if owner == cs_id]
                self.runtime.spawn_holon(
                    HolonDescriptor(id=cs_id, role=HolonRole.SUPERVISOR,
                                    parent=self.sos_id),
                    CsSupervisor(fleet))
        else:
            from .baseline import CentralDispatcher
            self.cs_of = {vid: self.sos_id for vid in self.vehicles}
            self.runtime.spawn_holon(
                HolonDescriptor(id=self.sos_id, role=HolonRole.SUPERVISOR),
                CentralDispatcher())

        for human in spec.humans:
            self.runtime.spawn_holon(
                HolonDescriptor(id=human["id"], role=HolonRole.HUMAN_RESOURCE,
                                parent=self.sos_id),
                HumanAgent())
        for vid in sorted(self.vehicles):
            capability = "drive" if self.vehicles[vid].vclass is VehicleClass.UGV else "fly"
            self.runtime.spawn_holon(
                HolonDescriptor(id=vid, role=HolonRole.MACHINE_RESOURCE,
                                parent=self.cs_of[vid],
                                capabilities=frozenset({capability})),
                VehicleAgent(vid))

    # -- env surface used by behaviors ------------------------------------

    def reason(self, ctx: HolonContext, command: Command | dict[str, Any],
               digest: dict[str, Any],
               history: list[dict[str, Any]] | None = None) -> Decision:
        context = build_context(command, ctx.descriptor, digest,
                                history=history or [],
                                k=self.options.history_k,
                                budget=self.options.context_budget)

        def on_event(kind: str, detail: str) -> None:
            self.runtime.log_event(EventKind.STATE_CHANGED, {
                "entity": ctx.holon_id, "change": "reasoning_fallback",
                "kind": kind, "detail": detail,
            })

        return decide(context, self.backend, on_event=on_event)

    def next_mission_id(self) -> str:
        self._mission_seq += 1
        return f"M{self._mission_seq:03d}"

    def mark_vehicle_busy(self, vehicle_id: str, busy: bool) -> None:
        if self.runtime.has_holon(vehicle_id):
            self.runtime.set_status(
                vehicle_id, HolonStatus.BUSY if busy else HolonStatus.IDLE)

    def set_passenger(self, mission_id: str, mode: str, node: str | None = None,
                      vehicle: str | None = None) -> None:
        self.passengers[mission_id] = {"mode": mode, "node": node, "vehicle": vehicle}

    def _emit_store_event(self, kind: str, body: dict[str, Any]) -> None:
        self.runtime.log_event(_STORE_KINDS[kind], body)

    # -- schedule & stepping -----------------------------------------------

    def inject_mission(self, doc: dict[str, Any], mission_id: str | None = None) -> str:
        """Queue a mission submission for the current tick's human holon."""
        human = doc.get("human")
        if not human or not self.runtime.has_holon(human):
            raise ValueError(f"mission references unknown human {human!r}")
        mission_id = mission_id or self.next_mission_id()
        payload = {"mission_id": mission_id}
        for key in ("text", "origin", "destination", "objective"):
            if doc.get(key) is not None:
                payload[key] = doc[key]
        self.runtime.send(human, human, "user_input", payload,
                          correlation_id=mission_id)
        return mission_id

    def inject_disturbance(self, disturbance) -> None:
        self._disturbance_schedule.append(disturbance)
        self._disturbance_schedule.sort(key=lambda d: d.start)

    def step(self, n: int = 1) -> list[EventRecord]:
        start_index = len(self.runtime.log)
        for _ in range(n):
            tick = self.runtime.clock.now
            for d in self._book.expire(self.world, tick):
                self.runtime.log_event(EventKind.STATE_CHANGED, {
                    "entity": d.target, "change": "disturbance_expired",
                    "kind": d.kind.value,
                })
            due = [d for d in self._disturbance_schedule if d.start <= tick]
            self._disturbance_schedule = [d for d in self._disturbance_schedule
                                          if d.start > tick]
            for d in due:
                body = self._book.apply(self.world, self.vehicles, d, tick)
                self.runtime.log_event(EventKind.DISTURBANCE_APPLIED, body)
            while self._mission_schedule and int(self._mission_schedule[0].get("tick", 0)) <= tick:
                mission = self._mission_schedule.pop(0)
                self.inject_mission(mission)
            self.runtime.step(1)
        return self.runtime.log.since(start_index)

    def run(self) -> list[EventRecord]:
        """Step to the horizon and close out the run."""
        remaining = self.spec.horizon - self.runtime.clock.now
        if remaining > 0:
            self.step(remaining)
        self.finalize()
        return self.runtime.log.records

    def finalize(self) -> None:
        if self._finalized:
            return
        self._finalized = True
        self.runtime.log_event(EventKind.STATE_CHANGED, {
            "entity": "run", "change": "run_completed",
            "horizon": self.spec.horizon, "tick": self.runtime.clock.now,
        })

    # -- views ----------------------------------------------------------------

    def mission_states(self) -> dict[str, str]:
        behavior = self.runtime.behavior(self.sos_id)
        missions = getattr(behavior, "missions", {})
        return {mid: m.state for mid, m in missions.items()}

    def world_layout(self) -> dict[str, Any]:
        return {
            "nodes": [{"id": n.id, "pos": list(n.pos), "kind": n.kind.value}
                      for _, n in sorted(self.world.nodes.items())],
            "edges": [{"id": e.id, "from": e.src, "to": e.dst, "mode": e.mode.value,
                       "base_time": e.base_time, "cost": e.cost}
                      for _, e in sorted(self.world.edges.items())],
        }

    def snapshot(self) -> dict[str, Any]:
        holons = [self.runtime.descriptor(hid).summary()
                  for hid in self.runtime.holon_ids()]
        top_plans = [p for p in self.store.plans.values() if p.parent_task is None]
        return {
            "tick": self.runtime.clock.now,
            "scenario": self.spec.name,
            "governance": self.governance.value,
            "holons": holons,
            "vehicles": [self.vehicles[vid].summary(self.world)
                         for vid in sorted(self.vehicles)],
            "plans": [self.store.tree(p.plan_id)
                      for p in sorted(top_plans, key=lambda p: p.plan_id)],
            "edges": {eid: e.open for eid, e in sorted(self.world.edges.items())},
            "world": self.world_layout(),
            "passengers": {mid: dict(p) for mid, p in sorted(self.passengers.items())},
            "missions": self.mission_states(),
        }
