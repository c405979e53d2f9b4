"""Scenario documents: the world, the fleet partition, and the schedules."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import SosimError
from .roles.governance import GovernanceMode, parse_governance
from .world import Disturbance, VehicleClass, WorldGraph, load_world, parse_disturbance


class SpecError(SosimError):
    pass


@dataclass
class ScenarioSpec:
    name: str
    world_doc: dict[str, Any]
    supervisors: dict[str, Any]
    humans: list[dict[str, Any]]
    vehicles: list[dict[str, Any]]
    missions: list[dict[str, Any]]
    disturbances: list[Disturbance]
    governance: GovernanceMode
    seed: int
    horizon: int
    options: dict[str, Any] = field(default_factory=dict)

    def build_world(self) -> WorldGraph:
        return load_world(self.world_doc)


def load_scenario(source: dict[str, Any] | str | Path) -> ScenarioSpec:
    """Parse and validate a scenario document (dict or JSON file path)."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read scenario {source}: {exc}") from exc
        base = path.parent
    else:
        doc, base = source, Path(".")
    if not isinstance(doc, dict):
        raise SpecError("scenario must be an object")

    world_doc = doc.get("world")
    if isinstance(world_doc, str):
        world_path = base / world_doc
        try:
            world_doc = json.loads(world_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read world {world_path}: {exc}") from exc
    if not isinstance(world_doc, dict):
        raise SpecError("scenario requires a world document or file reference")

    try:
        world = load_world(world_doc)
    except SosimError as exc:
        raise SpecError(f"invalid world: {exc}") from exc

    horizon = doc.get("horizon", 0)
    if not isinstance(horizon, int) or horizon <= 0:
        raise SpecError("horizon must be a positive integer")

    governance = parse_governance(doc.get("governance", "Collaborative"))
    supervisors = doc.get("supervisors") or {"sos": "S-SoS", "cs": ["S-CS1", "S-CS2"]}
    if not supervisors.get("sos"):
        raise SpecError("supervisors.sos is required")
    cs_ids = list(supervisors.get("cs") or [])

    humans = list(doc.get("humans") or [])
    human_ids = {h.get("id") for h in humans}

    vehicles = list(doc.get("vehicles") or [])
    for v in vehicles:
        if v.get("id") is None:
            raise SpecError(f"vehicle without id: {v!r}")
        try:
            VehicleClass(v.get("class"))
        except ValueError as exc:
            raise SpecError(f"vehicle {v['id']}: bad class {v.get('class')!r}") from exc
        if v.get("at") not in world.nodes:
            raise SpecError(f"vehicle {v['id']} placed at unknown node {v.get('at')!r}")
        if cs_ids and v.get("cs") not in cs_ids:
            raise SpecError(f"vehicle {v['id']} assigned to unknown supervisor {v.get('cs')!r}")

    missions = sorted(doc.get("missions") or [], key=lambda m: int(m.get("tick", 0)))
    for m in missions:
        if m.get("human") not in human_ids:
            raise SpecError(f"mission references unknown human {m.get('human')!r}")
        if "text" not in m:
            for key in ("origin", "destination"):
                if m.get(key) not in world.nodes:
                    raise SpecError(f"mission {key} {m.get(key)!r} not in world")

    disturbances = []
    for d in doc.get("disturbances") or []:
        parsed = parse_disturbance(d)
        if parsed.kind.value == "VehicleFailure":
            if parsed.target not in {v["id"] for v in vehicles}:
                raise SpecError(f"disturbance targets unknown vehicle {parsed.target!r}")
        elif parsed.target not in world.edges:
            raise SpecError(f"disturbance targets unknown edge {parsed.target!r}")
        disturbances.append(parsed)
    disturbances.sort(key=lambda d: d.start)

    return ScenarioSpec(
        name=str(doc.get("name", "scenario")),
        world_doc=world_doc,
        supervisors=supervisors,
        humans=humans,
        vehicles=vehicles,
        missions=missions,
        disturbances=disturbances,
        governance=governance,
        seed=int(doc.get("seed", 0)),
        horizon=horizon,
        options=dict(doc.get("options") or {}),
    )
