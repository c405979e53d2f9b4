"""Per-leg resource estimation shared by bidding and central assignment.

This is communication-layer resource bookkeeping: it turns live vehicle
state plus a commitments ledger into candidate estimates; the reasoning
layer then picks among the candidates.
"""

from __future__ import annotations

from typing import Any

from ..plans import Objective
from ..routing import NoRoute, path_weight, shortest_multimodal_path
from ..world import EdgeMode, Health, VehicleClass, VehicleState, VEHICLE_MODE

_LEG_MODE_TO_CLASS = {"Drive": VehicleClass.UGV, "Fly": VehicleClass.UAV}


def available_modes(vehicles: dict[str, VehicleState]) -> tuple[EdgeMode, ...]:
    """Edge modes the fleet can currently serve; transfers need no vehicle.

    Route searches mask out modes with no healthy vehicle anywhere, so a
    journey is never planned through a layer nobody can fly or drive.
    """
    classes = {v.vclass for v in vehicles.values() if v.health is Health.OK}
    modes = [EdgeMode.TRANSFER]
    if VehicleClass.UGV in classes:
        modes.append(EdgeMode.DRIVE)
    if VehicleClass.UAV in classes:
        modes.append(EdgeMode.FLY)
    return tuple(modes)


def leg_candidates(env: Any, now: int, leg: dict[str, Any], vehicle_ids: list[str],
                   commitments: dict[str, tuple[int, str]] | None = None) -> list[dict[str, Any]]:
    """Estimate (est_time, est_cost) per eligible vehicle for one leg.

    est_time = wait until the vehicle frees + empty reposition to the leg
    origin + the leg itself; est_cost adds the reposition cost to the leg
    cost. Vehicles with no open same-mode path to the leg origin are
    skipped. Deterministic: candidates come back sorted by resource id.
    """
    commitments = commitments or {}
    needed = _LEG_MODE_TO_CLASS.get(leg["mode"])
    if needed is None:
        return []
    mode = VEHICLE_MODE[needed]
    out: list[dict[str, Any]] = []
    for vid in sorted(vehicle_ids):
        vehicle = env.vehicles.get(vid)
        if vehicle is None or vehicle.health is not Health.OK:
            continue
        if vehicle.vclass is not needed:
            continue
        free_at, free_node = commitments.get(vid, (now, None))
        if free_node is None:
            if vehicle.at_node is not None:
                free_node = vehicle.at_node
            else:
                free_node = env.world.edges[vehicle.edge].dst
        try:
            pickup = shortest_multimodal_path(
                env.world, free_node, leg["origin"], Objective.FASTEST_TIME,
                allowed_modes=(mode,))
        except NoRoute:
            continue
        pickup_time = int(path_weight(env.world, pickup, Objective.FASTEST_TIME))
        pickup_cost = path_weight(env.world, pickup, Objective.LOWEST_COST)
        out.append({
            "resource": vid,
            "est_time": max(0, free_at - now) + pickup_time + int(leg["est_time"]),
            "est_cost": pickup_cost + float(leg["est_cost"]),
        })
    return out


def best_candidate(candidates: list[dict[str, Any]], objective: Objective) -> dict[str, Any] | None:
    if not candidates:
        return None
    key = "est_time" if objective is Objective.FASTEST_TIME else "est_cost"
    return min(candidates, key=lambda c: (c[key], c["resource"]))
