"""Evaluation metrics computed purely from an event log.

Every field derives from log records alone, so recomputing offline from a
persisted log reproduces the record emitted inline, field-exact.
MetricSample records are ignored on input, which keeps the computation
stable when a log already carries inline samples or heartbeats.

Definitions:
  response_time     ticks from mission_received to the first plan_activated
                    of that mission (mean and p95 over missions).
  utilization       per vehicle: busy_ticks / horizon, where busy ticks are
                    the union of [Active, closed) intervals of every task
                    assigned to the vehicle; never-assigned vehicles score 0.
  completion_rate   missions completed / missions received.
  adaptability      mean ticks from each DisturbanceApplied to the first
                    subsequent leg award or plan repair.
  throughput        missions completed per 1000 ticks of horizon.
  satisfaction      mean over completed missions of promised/actual travel
                    time, each ratio capped at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from .eventlog import EventKind, EventRecord, MalformedLog


@dataclass(frozen=True)
class MetricsRecord:
    horizon: int
    missions_total: int
    missions_done: int
    missions_failed: int
    response_time_mean: float | None
    response_time_p95: float | None
    completion_rate: float | None
    utilization: dict[str, float] = field(default_factory=dict)
    utilization_mean: float | None = None
    adaptability_mean: float | None = None
    throughput_per_1k: float | None = None
    satisfaction_mean: float | None = None

    def to_dict(self) -> dict[str, Any]:
        """Plain document; absent metrics are simply not present."""
        doc: dict[str, Any] = {
            "horizon": self.horizon,
            "missions_total": self.missions_total,
            "missions_done": self.missions_done,
            "missions_failed": self.missions_failed,
            "utilization": dict(sorted(self.utilization.items())),
        }
        for key in ("response_time_mean", "response_time_p95", "completion_rate",
                    "utilization_mean", "adaptability_mean", "throughput_per_1k",
                    "satisfaction_mean"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        return doc


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def _p95(values: list[float]) -> float | None:
    if not values:
        return None
    ordered = sorted(values)
    return ordered[max(0, math.ceil(0.95 * len(ordered)) - 1)]


def _union_length(intervals: list[tuple[int, int]]) -> int:
    total = 0
    end = None
    for start, stop in sorted(intervals):
        if end is None or start > end:
            total += max(0, stop - start)
            end = stop
        elif stop > end:
            total += stop - end
            end = stop
    return total


def compute_metrics(records: Iterable[EventRecord]) -> MetricsRecord:
    """Pure function of the log; see the module docstring for definitions."""
    horizon: int | None = None
    max_tick = 0
    vehicles: set[str] = set()
    received: dict[str, int] = {}
    activated: dict[str, int] = {}
    promised: dict[str, float] = {}
    completed: dict[str, dict[str, Any]] = {}
    failed: set[str] = set()
    disturbance_ticks: list[int] = []
    repair_ticks: list[int] = []
    task_resource: dict[str, str] = {}
    task_active: dict[str, int] = {}
    intervals: dict[str, list[tuple[int, int]]] = {}

    for record in records:
        if not isinstance(record, EventRecord):
            raise MalformedLog(f"not an event record: {record!r}")
        kind = record.kind
        if kind is EventKind.METRIC_SAMPLE:
            continue
        max_tick = max(max_tick, record.tick)
        body = record.body
        if kind is EventKind.DISTURBANCE_APPLIED:
            disturbance_ticks.append(record.tick)
        elif kind is EventKind.STATE_CHANGED:
            change = body.get("change")
            if change == "run_completed":
                horizon = int(body.get("horizon", 0)) or None
            elif change == "vehicle_registered":
                vehicles.add(body["entity"])
            elif change == "mission_received":
                received.setdefault(body["entity"], record.tick)
            elif change == "plan_activated":
                mission = body.get("mission_id")
                if mission is not None and mission not in activated:
                    activated[mission] = record.tick
                    promised[mission] = float(body.get("promised_time", 0))
            elif change == "mission_completed":
                completed.setdefault(body["entity"], {
                    "tick": record.tick,
                    "actual_time": body.get("actual_time"),
                })
            elif change == "mission_failed":
                failed.add(body["entity"])
            elif change in ("leg_award", "plan_repaired"):
                repair_ticks.append(record.tick)
        elif kind is EventKind.TASK_STATUS_CHANGED:
            task_id = body.get("task_id")
            if task_id is None:
                raise MalformedLog("TaskStatusChanged without task_id")
            status = body.get("status")
            resource = body.get("assigned_resource")
            if resource:
                task_resource[task_id] = resource
            if status == "Active":
                task_active.setdefault(task_id, record.tick)
            elif status in ("Done", "Failed") and task_id in task_active:
                start = task_active.pop(task_id)
                resource = task_resource.get(task_id)
                if resource:
                    intervals.setdefault(resource, []).append((start, record.tick))

    if horizon is None:
        horizon = max_tick + 1
    # Tasks still open at the end of the log stay busy through the horizon.
    for task_id, start in task_active.items():
        resource = task_resource.get(task_id)
        if resource:
            intervals.setdefault(resource, []).append((start, horizon))

    utilization = {vid: 0.0 for vid in vehicles}
    for vid, spans in intervals.items():
        if vid in utilization or not vehicles:
            utilization[vid] = min(1.0, _union_length(spans) / horizon)
    response = [float(activated[m] - received[m]) for m in activated if m in received]
    ratios = []
    for mission, info in completed.items():
        actual = info.get("actual_time")
        if actual is None or mission not in promised:
            continue
        ratios.append(1.0 if actual <= 0 else min(1.0, promised[mission] / actual))
    deltas = []
    for t in disturbance_ticks:
        after = [r for r in repair_ticks if r >= t]
        if after:
            deltas.append(float(min(after) - t))

    total = len(received)
    done = len(completed)
    return MetricsRecord(
        horizon=horizon,
        missions_total=total,
        missions_done=done,
        missions_failed=len(failed),
        response_time_mean=_mean(response),
        response_time_p95=_p95(response),
        completion_rate=(done / total) if total else None,
        utilization=utilization,
        utilization_mean=_mean(list(utilization.values())),
        adaptability_mean=_mean(deltas),
        throughput_per_1k=(done / horizon * 1000.0) if total else None,
        satisfaction_mean=_mean(ratios),
    )
