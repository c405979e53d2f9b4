"""Hierarchical plan/task records and the shared status lifecycle.

A mission's top-level plan holds an ordered list of tasks; locomotion
tasks may carry a sub-plan of single-edge micro tasks. Depth is capped at
two plan levels (plan -> task -> sub-plan -> micro task). Status moves
monotonically Pending -> Active -> {Done, Failed}; Pending may fail
directly when a task is superseded by a replan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from .errors import SosimError


class BadTransition(SosimError):
    pass


class Objective(Enum):
    FASTEST_TIME = "FastestTime"
    LOWEST_COST = "LowestCost"


def parse_objective(value: Any) -> Objective:
    if isinstance(value, Objective):
        return value
    text = str(value).strip().lower()
    if text in ("fastest", "fastesttime", "fastest_time", "time", "quickest"):
        return Objective.FASTEST_TIME
    if text in ("cheapest", "lowestcost", "lowest_cost", "cost", "least expensive"):
        return Objective.LOWEST_COST
    raise SosimError(f"unknown objective {value!r}")


class Status(Enum):
    PENDING = "Pending"
    ACTIVE = "Active"
    DONE = "Done"
    FAILED = "Failed"


_ALLOWED = {
    Status.PENDING: {Status.ACTIVE, Status.FAILED, Status.DONE},
    Status.ACTIVE: {Status.DONE, Status.FAILED},
    Status.DONE: set(),
    Status.FAILED: set(),
}


class TaskKind(Enum):
    DRIVE = "Drive"
    FLY = "Fly"
    TRANSFER = "Transfer"
    COMPOSITE = "Composite"


@dataclass
class TaskSpec:
    task_id: str
    kind: TaskKind
    route: list[str]  # edge ids, single mode; a Transfer task carries its pad edge
    parent_plan: str
    mission_id: str
    assigned_resource: str | None = None
    sub_plan: str | None = None
    status: Status = Status.PENDING
    instruction: str | None = None
    est_time: int = 0
    est_cost: float = 0.0

    def summary(self) -> dict[str, Any]:
        return {
            "task_id": self.task_id,
            "kind": self.kind.value,
            "route": list(self.route),
            "parent_plan": self.parent_plan,
            "mission_id": self.mission_id,
            "assigned_resource": self.assigned_resource,
            "sub_plan": self.sub_plan,
            "status": self.status.value,
            "instruction": self.instruction,
            "est_time": self.est_time,
            "est_cost": self.est_cost,
        }


@dataclass
class Plan:
    plan_id: str
    mission_id: str
    tasks: list[str] = field(default_factory=list)
    parent_task: str | None = None
    status: Status = Status.PENDING

    def summary(self) -> dict[str, Any]:
        return {
            "plan_id": self.plan_id,
            "mission_id": self.mission_id,
            "tasks": list(self.tasks),
            "parent_task": self.parent_task,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class RouteSegment:
    """A contiguous run of same-mode edges with its total weights."""

    edges: tuple[str, ...]
    mode: TaskKind
    origin: str
    destination: str
    total_time: int
    total_cost: float

    def leg(self) -> dict[str, Any]:
        return {
            "edges": list(self.edges),
            "mode": self.mode.value,
            "origin": self.origin,
            "destination": self.destination,
            "est_time": self.total_time,
            "est_cost": self.total_cost,
        }


class PlanStore:
    """Indexed view over all plans and tasks of one run.

    Each plan/task is mutated only by its owning holon; the store exists so
    snapshots, metrics, and tests can see the tree. Transitions route
    through :meth:`set_task_status` / :meth:`set_plan_status`, which enforce
    monotonicity and emit log events through the supplied callback.
    """

    def __init__(self, emit: Callable[[str, dict[str, Any]], None] | None = None) -> None:
        self.plans: dict[str, Plan] = {}
        self.tasks: dict[str, TaskSpec] = {}
        self._emit = emit or (lambda kind, body: None)

    def add_plan(self, plan: Plan, promised_time: int = 0, promised_cost: float = 0.0) -> Plan:
        self.plans[plan.plan_id] = plan
        self._emit("PlanCreated", {
            "plan_id": plan.plan_id,
            "mission_id": plan.mission_id,
            "parent_task": plan.parent_task,
            "tasks": list(plan.tasks),
            "status": plan.status.value,
            "promised_time": promised_time,
            "promised_cost": promised_cost,
        })
        return plan

    def add_task(self, task: TaskSpec) -> TaskSpec:
        self.tasks[task.task_id] = task
        self._emit("TaskStatusChanged", self._task_body(task, created=True))
        return task

    def set_task_status(self, task_id: str, status: Status, **extra: Any) -> TaskSpec:
        task = self.tasks[task_id]
        if status is task.status:
            return task
        if status not in _ALLOWED[task.status]:
            raise BadTransition(f"task {task_id}: {task.status.value} -> {status.value}")
        task.status = status
        body = self._task_body(task)
        body.update(extra)
        self._emit("TaskStatusChanged", body)
        return task

    def set_plan_status(self, plan_id: str, status: Status, **extra: Any) -> Plan:
        plan = self.plans[plan_id]
        if status is plan.status:
            return plan
        if status not in _ALLOWED[plan.status]:
            raise BadTransition(f"plan {plan_id}: {plan.status.value} -> {status.value}")
        plan.status = status
        body = {"entity": plan.plan_id, "change": "plan_status",
                "mission_id": plan.mission_id, "status": status.value}
        body.update(extra)
        self._emit("StateChanged", body)
        return plan

    def assign_resource(self, task_id: str, resource: str | None) -> TaskSpec:
        task = self.tasks[task_id]
        task.assigned_resource = resource
        return task

    def tree(self, plan_id: str) -> dict[str, Any]:
        """Plan with tasks expanded recursively into sub-plan trees."""
        plan = self.plans[plan_id]
        doc = plan.summary()
        doc["tasks"] = []
        for tid in plan.tasks:
            task = self.tasks[tid]
            tdoc = task.summary()
            if task.sub_plan and task.sub_plan in self.plans:
                tdoc["sub_plan"] = self.tree(task.sub_plan)
            doc["tasks"].append(tdoc)
        return doc

    @staticmethod
    def _task_body(task: TaskSpec, created: bool = False) -> dict[str, Any]:
        return {
            "task_id": task.task_id,
            "plan_id": task.parent_plan,
            "mission_id": task.mission_id,
            "kind": task.kind.value,
            "status": task.status.value,
            "assigned_resource": task.assigned_resource,
            "sub_plan": task.sub_plan,
            "route": list(task.route),
            "created": created,
        }
