"""Shared log-scanning utilities for integration and acceptance tests."""

from __future__ import annotations

import json
from importlib import resources

from sosim.eventlog import EventKind
from sosim.plans import Objective


def enumerate_min_weight(world, origin, destination, objective):
    """Independent oracle: exhaustive DFS over all simple open-edge paths."""
    is_time = objective is Objective.FASTEST_TIME
    best = None
    stack = [(origin, [], {origin})]
    while stack:
        node, edges, visited = stack.pop()
        if node == destination:
            w = sum(world.edge_weight(world.edges[e], is_time) for e in edges)
            if best is None or w < best:
                best = w
            continue
        for edge in world.open_out_edges(node):
            if edge.dst in visited:
                continue
            stack.append((edge.dst, edges + [edge.id], visited | {edge.dst}))
    return best


def demo_scenario_doc() -> dict:
    base = resources.files("sosim.data")
    doc = json.loads(base.joinpath("demo_scenario.json").read_text())
    doc["world"] = json.loads(base.joinpath("demo_world.json").read_text())
    return doc


def changes(records, *names):
    return [r for r in records
            if r.kind is EventKind.STATE_CHANGED and r.body.get("change") in names]


def sent(records, *kinds):
    return [r for r in records
            if r.kind is EventKind.MESSAGE_SENT and r.body.get("kind") in kinds]


def mission_outcomes(records) -> dict[str, str]:
    out = {}
    for r in changes(records, "mission_completed", "mission_failed"):
        out.setdefault(r.body["entity"], r.body["change"])
    return out


def task_events(records):
    return [r for r in records if r.kind is EventKind.TASK_STATUS_CHANGED]


def leaf_busy_intervals(records, horizon: int) -> dict[str, list[tuple[int, int]]]:
    """Active->closed intervals of leaf tasks (no sub-plan) per resource."""
    opened: dict[str, tuple[str, int]] = {}
    intervals: dict[str, list[tuple[int, int]]] = {}
    for r in task_events(records):
        b = r.body
        tid, status = b["task_id"], b["status"]
        if b.get("sub_plan"):
            continue
        if status == "Active" and b.get("assigned_resource"):
            opened[tid] = (b["assigned_resource"], r.tick)
        elif status in ("Done", "Failed") and tid in opened:
            resource, start = opened.pop(tid)
            intervals.setdefault(resource, []).append((start, r.tick))
    for tid, (resource, start) in opened.items():
        intervals.setdefault(resource, []).append((start, horizon))
    return intervals


def assert_capacity_one(records, horizon: int) -> None:
    """No vehicle ever runs two active leaf tasks at once."""
    for resource, spans in leaf_busy_intervals(records, horizon).items():
        ordered = sorted(spans)
        for (s1, e1), (s2, e2) in zip(ordered, ordered[1:]):
            assert e1 <= s2, f"{resource} overlaps: ({s1},{e1}) vs ({s2},{e2})"


def closure_windows(records, horizon: int) -> dict[str, list[tuple[int, int]]]:
    """Closed intervals per edge reconstructed from the log."""
    windows: dict[str, list[tuple[int, int]]] = {}
    open_since: dict[str, int] = {}
    for r in records:
        if r.kind is EventKind.DISTURBANCE_APPLIED and r.body.get("kind") == "EdgeClosure":
            open_since.setdefault(r.body["target"], r.tick)
        elif (r.kind is EventKind.STATE_CHANGED
              and r.body.get("change") == "disturbance_expired"
              and r.body.get("kind") == "EdgeClosure"):
            target = r.body["entity"]
            if target in open_since:
                windows.setdefault(target, []).append((open_since.pop(target), r.tick))
    for target, start in open_since.items():
        windows.setdefault(target, []).append((start, horizon + 1))
    return windows


def assert_no_closed_edge_traversed(records, horizon: int) -> None:
    """Completed single-edge traversals never overlap a closure window.

    Micro tasks carry exactly one edge; a micro that went Active at a and
    Done at d moved on its edge during every tick of [a, d], so that span
    must not intersect any closure window of the edge.
    """
    windows = closure_windows(records, horizon)
    if not windows:
        return
    active_at: dict[str, int] = {}
    for r in task_events(records):
        b = r.body
        tid = b["task_id"]
        if b.get("sub_plan") or b.get("kind") not in ("Drive", "Fly"):
            continue
        if b["status"] == "Active":
            active_at[tid] = r.tick
        elif b["status"] == "Done" and tid in active_at and len(b.get("route", [])) == 1:
            start, end = active_at.pop(tid), r.tick
            edge = b["route"][0]
            for (c0, c1) in windows.get(edge, []):
                overlap = max(start, c0) <= min(end, c1 - 1)
                assert not overlap, (
                    f"micro task {tid} moved on {edge} during closure [{c0},{c1})")
