"""Centralized comparison coordinator: one dispatcher, no negotiation.

The dispatcher owns every mission and assigns vehicles by a global greedy
argmin over the whole fleet; no call-for-proposal traffic exists. Task
execution reuses the same task holons as the holonic coordinator so both
architectures produce directly comparable event logs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .eventlog import EventKind
from .kernel import Behavior, Envelope, HolonContext, HolonDescriptor, HolonRole
from .plans import Status, parse_objective
from .roles.fleet import available_modes, best_candidate, leg_candidates
from .roles.task import TaskExecutor
from .routing import NoRoute, decompose_mission, replan_route
from .world import Health


@dataclass
class _DispatchedMission:
    mission_id: str
    requester: str
    origin: str
    destination: str
    objective: Any
    plan_id: str | None = None
    task_order: list[str] = field(default_factory=list)
    active_index: int = -1
    revision: int = 0
    activation_tick: int | None = None
    actual_cost: float = 0.0
    state: str = "active"  # active|done|failed


class CentralDispatcher(Behavior):
    def __init__(self) -> None:
        self.missions: dict[str, _DispatchedMission] = {}
        self._commitments: dict[str, tuple[int, str]] = {}
        self._award_seq = 0

    def on_message(self, ctx: HolonContext, envelope: Envelope) -> None:
        kind = envelope.kind
        if kind == "mission_request":
            self._accept(ctx, envelope)
        elif kind == "task_done":
            self._task_done(ctx, envelope.payload)
        elif kind == "escalate":
            self._escalated(ctx, envelope.payload)

    def on_tick(self, ctx: HolonContext) -> None:
        # Global re-check every tick: any not-yet-started work invalidated
        # by a disturbance is reassigned immediately.
        for mission in list(self.missions.values()):
            if mission.state != "active":
                continue
            store = ctx.env.store
            for tid in mission.task_order[mission.active_index + 1:]:
                task = store.tasks[tid]
                if task.status is not Status.PENDING:
                    continue
                blocked = any(not ctx.env.world.edges[e].open for e in task.route)
                vehicle = ctx.env.vehicles.get(task.assigned_resource or "")
                lost = vehicle is not None and vehicle.health is not Health.OK
                if blocked or lost:
                    self._replan(ctx, mission, self._resume_node(ctx, mission),
                                 keep_active=True)
                    break

    # -- intake ----------------------------------------------------------

    def _accept(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        mission = _DispatchedMission(
            mission_id=p["mission_id"],
            requester=p.get("requester", envelope.sender),
            origin=p["origin"], destination=p["destination"],
            objective=parse_objective(p.get("objective") or "fastest"),
        )
        self.missions[mission.mission_id] = mission
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "mission_received",
            "origin": mission.origin, "destination": mission.destination,
            "objective": mission.objective.value, "requester": mission.requester,
        })
        try:
            path = replan_route(ctx.env.world, mission.origin, mission.destination,
                                mission.objective,
                                allowed_modes=available_modes(ctx.env.vehicles))
        except NoRoute as exc:
            self._fail(ctx, mission, f"NoRoute: {exc}")
            return
        store = ctx.env.store
        plan, tasks = decompose_mission(ctx.env.world, path, mission.mission_id)
        mission.plan_id = plan.plan_id
        mission.task_order = [t.task_id for t in tasks]
        store.add_plan(plan, promised_time=sum(t.est_time for t in tasks),
                       promised_cost=sum(t.est_cost for t in tasks))
        for t in tasks:
            store.add_task(t)
        ctx.env.set_passenger(mission.mission_id, mode="node", node=mission.origin)
        if not self._assign(ctx, mission, tasks, replan=False):
            return
        if tasks:
            mission.activation_tick = ctx.now
            store.set_plan_status(plan.plan_id, Status.ACTIVE)
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": plan.plan_id, "change": "plan_activated",
            "mission_id": mission.mission_id,
            "promised_time": sum(t.est_time for t in tasks),
        })
        ctx.send(mission.requester, "status_update", {
            "mission_id": mission.mission_id, "phase": "plan_activated",
        }, correlation_id=mission.mission_id)
        self._spawn_tasks(ctx, mission)
        self._start_next(ctx, mission)

    def _assign(self, ctx: HolonContext, mission: _DispatchedMission, tasks,
                replan: bool) -> bool:
        store = ctx.env.store
        world = ctx.env.world
        for t in tasks:
            if t.kind.value not in ("Drive", "Fly"):
                continue
            leg = {
                "mode": t.kind.value,
                "origin": world.edges[t.route[0]].src,
                "destination": world.edges[t.route[-1]].dst,
                "est_time": t.est_time, "est_cost": t.est_cost,
            }
            candidates = leg_candidates(ctx.env, ctx.now, leg,
                                        sorted(ctx.env.vehicles), self._commitments)
            choice = best_candidate(candidates, mission.objective)
            if choice is None:
                self._fail(ctx, mission, "NoCapacity: no feasible resource")
                return False
            store.assign_resource(t.task_id, choice["resource"])
            free_at, _ = self._commitments.get(choice["resource"], (ctx.now, ""))
            self._commitments[choice["resource"]] = (
                max(ctx.now, free_at) + choice["est_time"], leg["destination"])
            self._award_seq += 1
            ctx.log(EventKind.STATE_CHANGED, {
                "entity": mission.mission_id, "change": "leg_award",
                "cfp_id": f"{mission.mission_id}-C{self._award_seq}",
                "task_id": t.task_id, "winner": ctx.holon_id,
                "resource": choice["resource"], "replan": replan,
                "governance": "Centralized",
            })
        return True

    def _spawn_tasks(self, ctx: HolonContext, mission: _DispatchedMission) -> None:
        store = ctx.env.store
        for tid in mission.task_order:
            if store.tasks[tid].status is Status.PENDING and not ctx.has_holon(tid):
                ctx.spawn(HolonDescriptor(id=tid, role=HolonRole.TASK,
                                          parent=ctx.holon_id),
                          TaskExecutor(tid))

    # -- execution ---------------------------------------------------------

    def _start_next(self, ctx: HolonContext, mission: _DispatchedMission) -> None:
        store = ctx.env.store
        if 0 <= mission.active_index < len(mission.task_order):
            current = store.tasks[mission.task_order[mission.active_index]]
            if current.status in (Status.PENDING, Status.ACTIVE):
                return
        for i in range(mission.active_index + 1, len(mission.task_order)):
            tid = mission.task_order[i]
            if store.tasks[tid].status is Status.PENDING:
                mission.active_index = i
                ctx.send(tid, "start", {"task_id": tid},
                         correlation_id=mission.mission_id)
                return
        self._complete(ctx, mission)

    def _task_done(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        mission = self._mission_of_task(p.get("task_id", ""))
        if mission is None or mission.state != "active":
            return
        mission.actual_cost += float(p.get("cost", 0.0))
        ctx.send(mission.requester, "status_update", {
            "mission_id": mission.mission_id, "phase": "leg_done",
            "task_id": p["task_id"], "at": p.get("at"),
        }, correlation_id=mission.mission_id)
        self._start_next(ctx, mission)

    def _complete(self, ctx: HolonContext, mission: _DispatchedMission) -> None:
        store = ctx.env.store
        if any(store.tasks[t].status is not Status.DONE for t in mission.task_order):
            return
        mission.state = "done"
        if mission.plan_id:
            store.set_plan_status(mission.plan_id, Status.DONE)
        actual_time = ctx.now - (mission.activation_tick or ctx.now)
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "mission_completed",
            "actual_time": actual_time, "actual_cost": mission.actual_cost,
        })
        ctx.send(mission.requester, "report", {
            "mission_id": mission.mission_id, "outcome": "completed",
            "actual_time": actual_time, "actual_cost": mission.actual_cost,
        }, correlation_id=mission.mission_id)

    # -- repair --------------------------------------------------------------

    def _resume_node(self, ctx: HolonContext, mission: _DispatchedMission) -> str:
        store = ctx.env.store
        if 0 <= mission.active_index < len(mission.task_order):
            active = store.tasks[mission.task_order[mission.active_index]]
            if active.status is Status.ACTIVE and active.route:
                return ctx.env.world.edges[active.route[-1]].dst
        passenger = ctx.env.passengers.get(mission.mission_id) or {}
        return passenger.get("node") or mission.origin

    def _escalated(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        mission = self._mission_of_task(p.get("task_id", ""))
        if mission is None or mission.state != "active":
            return
        self._replan(ctx, mission, p.get("at_node") or self._resume_node(ctx, mission),
                     keep_active=False)

    def _replan(self, ctx: HolonContext, mission: _DispatchedMission,
                from_node: str, keep_active: bool) -> None:
        store = ctx.env.store
        keep_upto = mission.active_index if keep_active else mission.active_index - 1
        for tid in mission.task_order[keep_upto + 1:]:
            task = store.tasks[tid]
            if task.status in (Status.PENDING, Status.ACTIVE):
                store.set_task_status(tid, Status.FAILED, superseded=True)
            if ctx.has_holon(tid):
                ctx.retire(tid)
        mission.task_order = mission.task_order[:keep_upto + 1]
        mission.active_index = min(mission.active_index, keep_upto)
        try:
            path = replan_route(ctx.env.world, from_node, mission.destination,
                                mission.objective,
                                allowed_modes=available_modes(ctx.env.vehicles))
        except NoRoute:
            self._fail(ctx, mission, "NoRoute after disturbance")
            return
        mission.revision += 1
        _, tasks = decompose_mission(ctx.env.world, path, mission.mission_id,
                                     revision=mission.revision)
        for t in tasks:
            t.parent_plan = mission.plan_id
            store.add_task(t)
            mission.task_order.append(t.task_id)
        plan = store.plans[mission.plan_id]
        plan.tasks = list(mission.task_order)
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.plan_id, "change": "plan_repaired",
            "mission_id": mission.mission_id, "from": from_node,
            "revision": mission.revision, "new_tasks": [t.task_id for t in tasks],
        })
        if not self._assign(ctx, mission, tasks, replan=True):
            return
        self._spawn_tasks(ctx, mission)
        self._start_next(ctx, mission)

    def _fail(self, ctx: HolonContext, mission: _DispatchedMission, reason: str) -> None:
        if mission.state == "failed":
            return
        mission.state = "failed"
        store = ctx.env.store
        for tid in mission.task_order:
            task = store.tasks.get(tid)
            if task and task.status in (Status.PENDING, Status.ACTIVE):
                store.set_task_status(tid, Status.FAILED, superseded=True)
            if ctx.has_holon(tid):
                ctx.retire(tid)
        if mission.plan_id and store.plans[mission.plan_id].status in (Status.PENDING,
                                                                       Status.ACTIVE):
            store.set_plan_status(mission.plan_id, Status.FAILED, reason=reason)
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "mission_failed", "reason": reason,
        })
        ctx.send(mission.requester, "report", {
            "mission_id": mission.mission_id, "outcome": "failed", "reason": reason,
        }, correlation_id=mission.mission_id)

    def _mission_of_task(self, task_id: str) -> _DispatchedMission | None:
        for mission in self.missions.values():
            if task_id in mission.task_order:
                return mission
        return None
