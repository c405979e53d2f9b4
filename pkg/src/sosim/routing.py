"""Multimodal route search, mission decomposition, and task expansion.

The search is a label-setting shortest path over open edges with
non-negative weights (effective travel time for FastestTime, monetary cost
for LowestCost). Ties on total weight are broken by the lexicographically
smallest node-id sequence, then by edge-id sequence for parallel edges, so
equal inputs always produce the same route. The tie-break is sound for
label setting because extending a path never changes the outcome of the
first differing element in either sequence.
"""

from __future__ import annotations

import heapq
from typing import Any

from .errors import SosimError
from .plans import Plan, Objective, RouteSegment, Status, TaskKind, TaskSpec
from .world import Edge, EdgeMode, WorldGraph


class NoRoute(SosimError):
    pass


class NotExpandable(SosimError):
    pass


_MODE_TO_TASK = {
    EdgeMode.DRIVE: TaskKind.DRIVE,
    EdgeMode.FLY: TaskKind.FLY,
    EdgeMode.TRANSFER: TaskKind.TRANSFER,
}


def shortest_multimodal_path(world: WorldGraph, origin: str, destination: str,
                             objective: Objective,
                             allowed_modes: tuple[EdgeMode, ...] | None = None) -> list[str]:
    """Cheapest open-edge path as an ordered edge-id list.

    ``allowed_modes`` restricts the search (used for single-mode vehicle
    repositioning); None means all modes.
    """
    if origin not in world.nodes:
        raise NoRoute(f"unknown origin {origin}")
    if destination not in world.nodes:
        raise NoRoute(f"unknown destination {destination}")
    if origin == destination:
        return []
    is_time = objective is Objective.FASTEST_TIME
    best: dict[str, tuple[float, tuple[str, ...], tuple[str, ...]]] = {}
    heap: list[tuple[float, tuple[str, ...], tuple[str, ...]]] = [(0.0, (origin,), ())]
    settled: set[str] = set()
    while heap:
        weight, nodes, edges = heapq.heappop(heap)
        node = nodes[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == destination:
            return list(edges)
        for edge in world.open_out_edges(node):
            if allowed_modes is not None and edge.mode not in allowed_modes:
                continue
            if edge.dst in settled or edge.dst in nodes:
                continue
            cand = (weight + world.edge_weight(edge, is_time),
                    nodes + (edge.dst,), edges + (edge.id,))
            prev = best.get(edge.dst)
            if prev is None or cand < prev:
                best[edge.dst] = cand
                heapq.heappush(heap, cand)
    raise NoRoute(f"no open route {origin} -> {destination}")


def path_weight(world: WorldGraph, edge_ids: list[str], objective: Objective) -> float:
    is_time = objective is Objective.FASTEST_TIME
    return sum(world.edge_weight(world.edges[eid], is_time) for eid in edge_ids)


def path_nodes(world: WorldGraph, edge_ids: list[str], origin: str) -> list[str]:
    nodes = [origin]
    for eid in edge_ids:
        nodes.append(world.edges[eid].dst)
    return nodes


def validate_path(world: WorldGraph, edge_ids: list[str]) -> None:
    for a, b in zip(edge_ids, edge_ids[1:]):
        if world.edges[a].dst != world.edges[b].src:
            raise SosimError(f"path not contiguous at {a} -> {b}")


def split_segments(world: WorldGraph, edge_ids: list[str]) -> list[RouteSegment]:
    """Maximal same-mode runs of a path, in order."""
    segments: list[RouteSegment] = []
    run: list[Edge] = []

    def flush() -> None:
        if not run:
            return
        segments.append(RouteSegment(
            edges=tuple(e.id for e in run),
            mode=_MODE_TO_TASK[run[0].mode],
            origin=run[0].src,
            destination=run[-1].dst,
            total_time=sum(e.effective_time for e in run),
            total_cost=sum(e.cost for e in run),
        ))
        run.clear()

    for eid in edge_ids:
        edge = world.edges[eid]
        if run and run[-1].mode is not edge.mode:
            flush()
        run.append(edge)
    flush()
    return segments


def decompose_mission(world: WorldGraph, edge_ids: list[str], mission_id: str,
                      revision: int = 0) -> tuple[Plan, list[TaskSpec]]:
    """Build the top-level plan: one task per maximal same-mode run.

    Transfer runs become Transfer tasks carrying their pad edge, so
    concatenating every task's route reproduces the input path exactly.
    An empty path yields an empty plan already marked Done.
    """
    validate_path(world, edge_ids)
    suffix = "" if revision == 0 else f".r{revision}"
    plan_id = f"{mission_id}-plan{suffix}"
    plan = Plan(plan_id=plan_id, mission_id=mission_id)
    tasks: list[TaskSpec] = []
    for i, seg in enumerate(split_segments(world, edge_ids), start=1):
        task = TaskSpec(
            task_id=f"{mission_id}-T{i}{suffix}",
            kind=seg.mode,
            route=list(seg.edges),
            parent_plan=plan_id,
            mission_id=mission_id,
            est_time=seg.total_time,
            est_cost=seg.total_cost,
        )
        tasks.append(task)
        plan.tasks.append(task.task_id)
    if not tasks:
        plan.status = Status.DONE
    return plan, tasks


def expand_task(world: WorldGraph, task: TaskSpec) -> tuple[Plan, list[TaskSpec]]:
    """Micro sub-plan for a locomotion task: one instructed task per edge.

    Every micro task inherits the parent's assigned resource; the passenger
    stays aboard the same vehicle for the whole leg.
    """
    if task.kind not in (TaskKind.DRIVE, TaskKind.FLY) or not task.route:
        raise NotExpandable(task.task_id)
    plan_id = f"{task.task_id}-sub"
    plan = Plan(plan_id=plan_id, mission_id=task.mission_id, parent_task=task.task_id)
    verb = "Drive" if task.kind is TaskKind.DRIVE else "Fly"
    micro: list[TaskSpec] = []
    for i, eid in enumerate(task.route, start=1):
        edge = world.edges[eid]
        m = TaskSpec(
            task_id=f"{task.task_id}.{i}",
            kind=task.kind,
            route=[eid],
            parent_plan=plan_id,
            mission_id=task.mission_id,
            assigned_resource=task.assigned_resource,
            instruction=f"{verb} along {eid} for {round(edge.length_m(world))} m",
            est_time=edge.effective_time,
            est_cost=edge.cost,
        )
        micro.append(m)
        plan.tasks.append(m.task_id)
    return plan, micro


def segment_legs(world: WorldGraph, edge_ids: list[str]) -> list[dict[str, Any]]:
    """Leg descriptors (locomotion segments only) for assignment rounds."""
    return [seg.leg() for seg in split_segments(world, edge_ids)
            if seg.mode in (TaskKind.DRIVE, TaskKind.FLY)]


def replan_route(world: WorldGraph, current: str, destination: str,
                 objective: Objective,
                 allowed_modes: tuple[EdgeMode, ...] | None = None) -> list[str]:
    """Fresh route for the remaining journey on the current world."""
    return shortest_multimodal_path(world, current, destination, objective,
                                    allowed_modes=allowed_modes)
