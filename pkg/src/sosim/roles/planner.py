"""Per-mission planner holon: route search, plan assembly, and repair.

One planner is spawned per mission. It turns the request into a top-level
plan (one task per same-mode leg), hands locomotion legs to the root
supervisor for assignment, spawns a task holon per task at activation, and
rebuilds the remaining journey whenever a disturbance invalidates it.
Completed tasks are never touched by a repair.
"""

from __future__ import annotations

from typing import Any

from ..eventlog import EventKind
from ..kernel import Behavior, Envelope, HolonContext, HolonDescriptor, HolonRole
from ..plans import Status, TaskKind
from ..routing import NoRoute, decompose_mission, replan_route
from .fleet import available_modes
from ..world import Health


class MissionPlanner(Behavior):
    def __init__(self) -> None:
        self.mission_id: str | None = None
        self.origin = self.destination = self.requester = None
        self.objective = None
        self.plan_id: str | None = None
        self.task_order: list[str] = []
        self.active_index: int = -1
        self.revision = 0
        self.activation_tick: int | None = None
        self.actual_cost = 0.0
        self.state = "new"  # new|awaiting_awards|executing|done|failed
        self._done_notified = False
        self._pending_escalation: str | None = None

    # -- messages ------------------------------------------------------

    def on_message(self, ctx: HolonContext, envelope: Envelope) -> None:
        kind = envelope.kind
        if kind == "build_plan":
            self._build(ctx, envelope.payload)
        elif kind == "activate_plan":
            self._activate(ctx, envelope.payload)
        elif kind == "task_done":
            self._task_done(ctx, envelope.payload)
        elif kind == "escalate":
            self._escalated(ctx, envelope.payload)
        elif kind == "abort_mission":
            self._fail(ctx, envelope.payload.get("reason", "aborted"))

    def on_tick(self, ctx: HolonContext) -> None:
        # Watch not-yet-started work for freshly blocked edges or lost
        # vehicles so a disturbance anywhere in the plan triggers repair
        # promptly, not when the broken leg finally starts.
        if self.state != "executing":
            return
        store = ctx.env.store
        for task_id in self.task_order[self.active_index + 1:]:
            task = store.tasks[task_id]
            if task.status is not Status.PENDING:
                continue
            blocked = any(not ctx.env.world.edges[eid].open for eid in task.route)
            vehicle = ctx.env.vehicles.get(task.assigned_resource or "")
            lost = vehicle is not None and vehicle.health is not Health.OK
            if blocked or lost:
                from_node = self._resume_node(ctx)
                self._replan(ctx, from_node, keep_active=True,
                             reason="edge closed ahead" if blocked else "resource lost")
                return

    # -- plan construction ----------------------------------------------

    def _build(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        from ..plans import parse_objective

        self.mission_id = p["mission_id"]
        self.origin, self.destination = p["origin"], p["destination"]
        self.objective = parse_objective(p["objective"])
        self.requester = p["requester"]
        try:
            path = replan_route(ctx.env.world, self.origin, self.destination, self.objective,
                                allowed_modes=available_modes(ctx.env.vehicles))
        except NoRoute as exc:
            self.state = "failed"
            ctx.send(ctx.descriptor.parent, "plan_failed", {
                "mission_id": self.mission_id,
                "reason": self._route_failure(ctx, exc),
            }, correlation_id=self.mission_id)
            return
        plan, tasks = decompose_mission(ctx.env.world, path, self.mission_id)
        self.plan_id = plan.plan_id
        self.task_order = [t.task_id for t in tasks]
        store = ctx.env.store
        promised = sum(t.est_time for t in tasks)
        store.add_plan(plan, promised_time=promised,
                       promised_cost=sum(t.est_cost for t in tasks))
        for t in tasks:
            store.add_task(t)
        ctx.env.passengers[self.mission_id] = {"mode": "node", "node": self.origin,
                                               "vehicle": None}
        ctx.send(self.requester, "status_update", {
            "mission_id": self.mission_id, "phase": "plan_created",
            "plan_id": plan.plan_id, "tasks": list(self.task_order),
        }, correlation_id=self.mission_id)
        self.state = "awaiting_awards"
        ctx.send(ctx.descriptor.parent, "plan_ready", {
            "mission_id": self.mission_id, "plan_id": plan.plan_id,
            "promised_time": promised, "revision": self.revision,
            "legs": self._legs_of(ctx, tasks),
        }, correlation_id=self.mission_id)

    def _route_failure(self, ctx: HolonContext, exc: NoRoute) -> str:
        # Distinguish "no vehicles can serve any route" from true topology
        # gaps: if the unrestricted search succeeds, capacity is the blocker.
        try:
            replan_route(ctx.env.world, self.origin, self.destination, self.objective)
        except NoRoute:
            return f"NoRoute: {exc}"
        return "NoCapacity: no vehicle class can serve the journey"

    @staticmethod
    def _legs_of(ctx: HolonContext, tasks) -> list[dict[str, Any]]:
        legs = []
        for t in tasks:
            if t.kind not in (TaskKind.DRIVE, TaskKind.FLY):
                continue
            world = ctx.env.world
            legs.append({
                "task_id": t.task_id, "mode": t.kind.value,
                "origin": world.edges[t.route[0]].src,
                "destination": world.edges[t.route[-1]].dst,
                "edges": list(t.route), "est_time": t.est_time, "est_cost": t.est_cost,
                "earliest_start": ctx.now,
            })
        return legs

    def _activate(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        if self.state not in ("awaiting_awards",):
            return
        store = ctx.env.store
        for task_id, resource in p.get("assignments", {}).items():
            if task_id in store.tasks:
                store.assign_resource(task_id, resource)
        fresh = [tid for tid in self.task_order
                 if store.tasks[tid].status is Status.PENDING
                 and not ctx.has_holon(tid)]
        from .task import TaskExecutor
        for tid in fresh:
            ctx.spawn(HolonDescriptor(id=tid, role=HolonRole.TASK, parent=ctx.holon_id),
                      TaskExecutor(tid))
        first_activation = self.activation_tick is None
        if first_activation:
            self.activation_tick = ctx.now
            if store.plans[self.plan_id].status is Status.PENDING:
                store.set_plan_status(self.plan_id, Status.ACTIVE)
            promised = sum(store.tasks[t].est_time for t in self.task_order)
            ctx.log(EventKind.STATE_CHANGED, {
                "entity": self.plan_id, "change": "plan_activated",
                "mission_id": self.mission_id, "promised_time": promised,
            })
            ctx.send(self.requester, "status_update", {
                "mission_id": self.mission_id, "phase": "plan_activated",
            }, correlation_id=self.mission_id)
        self.state = "executing"
        if self._pending_escalation is not None:
            node = self._pending_escalation
            self._pending_escalation = None
            self._replan(ctx, node, keep_active=False, reason="escalated during assignment")
            return
        self._start_next(ctx)

    # -- execution ------------------------------------------------------

    def _start_next(self, ctx: HolonContext) -> None:
        store = ctx.env.store
        if 0 <= self.active_index < len(self.task_order):
            current = store.tasks[self.task_order[self.active_index]]
            if current.status in (Status.PENDING, Status.ACTIVE):
                return  # still running or claiming; task_done will advance
        for i in range(self.active_index + 1, len(self.task_order)):
            tid = self.task_order[i]
            if store.tasks[tid].status is Status.PENDING:
                self.active_index = i
                ctx.send(tid, "start", {"task_id": tid}, correlation_id=self.mission_id)
                return
        self._complete(ctx)

    def _task_done(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        if self.state not in ("executing", "awaiting_awards"):
            return
        ctx.send(self.requester, "status_update", {
            "mission_id": self.mission_id, "phase": "leg_done",
            "task_id": p["task_id"], "at": p.get("at"),
        }, correlation_id=self.mission_id)
        self.actual_cost += float(p.get("cost", 0.0))
        if self.state == "executing":
            self._start_next(ctx)

    def _complete(self, ctx: HolonContext) -> None:
        if self._done_notified:
            return
        store = ctx.env.store
        if any(store.tasks[t].status is not Status.DONE for t in self.task_order):
            # Remaining non-done tasks exist only after a failure path.
            return
        self._done_notified = True
        self.state = "done"
        store.set_plan_status(self.plan_id, Status.DONE)
        actual_time = ctx.now - (self.activation_tick or ctx.now)
        ctx.send(ctx.descriptor.parent, "plan_completed", {
            "mission_id": self.mission_id, "actual_time": actual_time,
            "actual_cost": self.actual_cost,
        }, correlation_id=self.mission_id)
        ctx.send(self.requester, "status_update", {
            "mission_id": self.mission_id, "phase": "completed",
            "actual_time": actual_time,
        }, correlation_id=self.mission_id)

    # -- repair -----------------------------------------------------------

    def _resume_node(self, ctx: HolonContext) -> str:
        store = ctx.env.store
        if 0 <= self.active_index < len(self.task_order):
            active = store.tasks[self.task_order[self.active_index]]
            if active.status is Status.ACTIVE and active.route:
                return ctx.env.world.edges[active.route[-1]].dst
        passenger = ctx.env.passengers.get(self.mission_id) or {}
        return passenger.get("node") or self.origin

    def _escalated(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        if self.state == "awaiting_awards":
            self._pending_escalation = p.get("at_node") or self._resume_node(ctx)
            return
        if self.state != "executing":
            return
        self._replan(ctx, p.get("at_node") or self._resume_node(ctx),
                     keep_active=False, reason=p.get("reason", "escalated"))

    def _replan(self, ctx: HolonContext, from_node: str, keep_active: bool,
                reason: str) -> None:
        store = ctx.env.store
        keep_upto = self.active_index if keep_active else self.active_index - 1
        dropped = []
        for tid in self.task_order[keep_upto + 1:]:
            task = store.tasks[tid]
            if task.status in (Status.PENDING, Status.ACTIVE):
                store.set_task_status(tid, Status.FAILED, superseded=True)
            if ctx.has_holon(tid):
                ctx.retire(tid)
            dropped.append(tid)
        self.task_order = self.task_order[:keep_upto + 1]
        self.active_index = min(self.active_index, keep_upto)
        try:
            path = replan_route(ctx.env.world, from_node, self.destination, self.objective,
                                allowed_modes=available_modes(ctx.env.vehicles))
        except NoRoute:
            self._fail(ctx, f"NoRoute after disturbance ({reason})")
            return
        self.revision += 1
        _, tasks = decompose_mission(ctx.env.world, path, self.mission_id,
                                     revision=self.revision)
        for t in tasks:
            t.parent_plan = self.plan_id
            store.add_task(t)
            self.task_order.append(t.task_id)
        plan = store.plans[self.plan_id]
        plan.tasks = list(self.task_order)
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": self.plan_id, "change": "plan_repaired",
            "mission_id": self.mission_id, "reason": reason, "from": from_node,
            "revision": self.revision, "dropped": dropped,
            "new_tasks": [t.task_id for t in tasks],
        })
        if not tasks:
            # Already at the destination; nothing left to assign.
            self.state = "executing"
            self._start_next(ctx)
            return
        self.state = "awaiting_awards"
        ctx.send(ctx.descriptor.parent, "replan_ready", {
            "mission_id": self.mission_id, "plan_id": self.plan_id,
            "revision": self.revision, "legs": self._legs_of(ctx, tasks),
        }, correlation_id=self.mission_id)

    def _fail(self, ctx: HolonContext, reason: str) -> None:
        if self.state in ("done", "failed"):
            return
        self.state = "failed"
        store = ctx.env.store
        for tid in self.task_order:
            task = store.tasks.get(tid)
            if task and task.status in (Status.PENDING, Status.ACTIVE):
                store.set_task_status(tid, Status.FAILED, superseded=True)
            if ctx.has_holon(tid):
                ctx.retire(tid)
        if self.plan_id and store.plans[self.plan_id].status in (Status.PENDING, Status.ACTIVE):
            store.set_plan_status(self.plan_id, Status.FAILED, reason=reason)
        ctx.send(ctx.descriptor.parent, "plan_failed", {
            "mission_id": self.mission_id, "reason": reason,
        }, correlation_id=self.mission_id)
