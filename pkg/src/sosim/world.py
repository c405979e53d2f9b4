"""Multimodal city graph, vehicle kinematics, and disturbance effects.

The world is a typed graph with three node layers (ground junctions, air
waypoints, transfer pads) and mode-tagged edges. Transfers between ground
and air are timed edges between paired pad nodes and carry no vehicle.
World state is owned by the simulation loop; holons read snapshots and
mutate only through :func:`advance` / :func:`apply_disturbance` inside a
tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

from .errors import SosimError


class SchemaError(SosimError):
    pass


class InvariantViolation(SosimError):
    pass


class UnknownTarget(SosimError):
    pass


class IncompatibleMode(SosimError):
    pass


class EnergyExhausted(SosimError):
    pass


class EdgeClosed(SosimError):
    pass


class NodeKind(Enum):
    GROUND_JUNCTION = "GroundJunction"
    AIR_WAYPOINT = "AirWaypoint"
    TRANSFER_PAD = "TransferPad"


class EdgeMode(Enum):
    DRIVE = "Drive"
    FLY = "Fly"
    TRANSFER = "Transfer"


class VehicleClass(Enum):
    UGV = "UGV"
    UAV = "UAV"


class Health(Enum):
    OK = "OK"
    FAILED = "Failed"


# Which node kinds an edge of a given mode may touch.
_EDGE_ENDPOINTS = {
    EdgeMode.DRIVE: {NodeKind.GROUND_JUNCTION, NodeKind.TRANSFER_PAD},
    EdgeMode.FLY: {NodeKind.AIR_WAYPOINT, NodeKind.TRANSFER_PAD},
}

# Which edge mode a vehicle class may traverse.
VEHICLE_MODE = {VehicleClass.UGV: EdgeMode.DRIVE, VehicleClass.UAV: EdgeMode.FLY}


@dataclass
class Node:
    id: str
    pos: tuple[float, float, float]
    kind: NodeKind


@dataclass
class Edge:
    id: str
    src: str
    dst: str
    mode: EdgeMode
    base_time: int
    cost: float
    open: bool = True
    delay_factors: list[float] = field(default_factory=list)

    @property
    def effective_time(self) -> int:
        t = float(self.base_time)
        for f in self.delay_factors:
            t *= f
        return max(1, math.ceil(t))

    def length_m(self, world: "WorldGraph") -> float:
        a = world.nodes[self.src].pos
        b = world.nodes[self.dst].pos
        return math.dist(a, b)


class WorldGraph:
    """Validated graph; adjacency lists are kept in sorted edge-id order."""

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge]) -> None:
        self.nodes: dict[str, Node] = {}
        self.edges: dict[str, Edge] = {}
        self.out_edges: dict[str, list[str]] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise InvariantViolation(f"duplicate node id {node.id}")
            self.nodes[node.id] = node
            self.out_edges[node.id] = []
        for edge in edges:
            self._check_edge(edge)
            if edge.id in self.edges:
                raise InvariantViolation(f"duplicate edge id {edge.id}")
            self.edges[edge.id] = edge
            self.out_edges[edge.src].append(edge.id)
        for eids in self.out_edges.values():
            eids.sort()

    def _check_edge(self, edge: Edge) -> None:
        for endpoint in (edge.src, edge.dst):
            if endpoint not in self.nodes:
                raise InvariantViolation(f"edge {edge.id} touches unknown node {endpoint}")
        if edge.base_time < 1:
            raise InvariantViolation(f"edge {edge.id} base_time must be >= 1")
        if edge.cost < 0:
            raise InvariantViolation(f"edge {edge.id} cost must be >= 0")
        src_kind = self.nodes[edge.src].kind
        dst_kind = self.nodes[edge.dst].kind
        if edge.mode in _EDGE_ENDPOINTS:
            allowed = _EDGE_ENDPOINTS[edge.mode]
            if src_kind not in allowed or dst_kind not in allowed:
                raise InvariantViolation(
                    f"{edge.mode.value} edge {edge.id} touches disallowed node kind")
        else:  # Transfer: a pad handing the passenger between layers
            if NodeKind.TRANSFER_PAD not in (src_kind, dst_kind):
                raise InvariantViolation(f"Transfer edge {edge.id} must touch a TransferPad")
            if edge.src == edge.dst:
                raise InvariantViolation(f"Transfer edge {edge.id} must connect distinct nodes")

    def open_out_edges(self, node_id: str) -> list[Edge]:
        return [self.edges[eid] for eid in self.out_edges[node_id] if self.edges[eid].open]

    def edge_weight(self, edge: Edge, objective_is_time: bool) -> float:
        return float(edge.effective_time) if objective_is_time else float(edge.cost)


def load_world(doc: dict[str, Any]) -> WorldGraph:
    """Parse and validate a world document.

    Schema: {"nodes": [{"id", "pos": [x,y,z], "kind"}],
             "edges": [{"id", "from", "to", "mode", "base_time", "cost",
                        "bidirectional"?}]}
    A bidirectional entry expands into a second edge with id "<id>~".
    """
    if not isinstance(doc, dict):
        raise SchemaError("world document must be an object")
    raw_nodes = doc.get("nodes")
    raw_edges = doc.get("edges")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise SchemaError("world requires a non-empty node list")
    if not isinstance(raw_edges, list):
        raise SchemaError("world requires an edge list")
    nodes = []
    for item in raw_nodes:
        try:
            pos = item.get("pos", [0.0, 0.0, 0.0])
            nodes.append(Node(
                id=str(item["id"]),
                pos=(float(pos[0]), float(pos[1]), float(pos[2])),
                kind=NodeKind(item["kind"]),
            ))
        except (KeyError, ValueError, TypeError, IndexError) as exc:
            raise SchemaError(f"bad node entry {item!r}: {exc}") from exc
    edges = []
    for item in raw_edges:
        try:
            edge = Edge(
                id=str(item["id"]),
                src=str(item["from"]),
                dst=str(item["to"]),
                mode=EdgeMode(item["mode"]),
                base_time=int(item["base_time"]),
                cost=float(item.get("cost", 0.0)),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"bad edge entry {item!r}: {exc}") from exc
        edges.append(edge)
        if item.get("bidirectional"):
            edges.append(Edge(
                id=edge.id + "~", src=edge.dst, dst=edge.src, mode=edge.mode,
                base_time=edge.base_time, cost=edge.cost,
            ))
    return WorldGraph(nodes, edges)


@dataclass
class VehicleState:
    """A vehicle either sits at a node or progresses along one edge."""

    id: str
    vclass: VehicleClass
    at_node: str | None
    energy: float = 1000.0
    assigned_task: str | None = None
    health: Health = Health.OK
    edge: str | None = None
    edge_ticks: int = 0

    @property
    def moving(self) -> bool:
        return self.edge is not None

    def progress(self, world: WorldGraph) -> float:
        if self.edge is None:
            return 0.0
        return min(1.0, self.edge_ticks / world.edges[self.edge].effective_time)

    def summary(self, world: WorldGraph) -> dict[str, Any]:
        return {
            "id": self.id,
            "class": self.vclass.value,
            "at": self.at_node,
            "edge": self.edge,
            "progress": round(self.progress(world), 4),
            "energy": self.energy,
            "assigned_task": self.assigned_task,
            "health": self.health.value,
        }


def begin_edge(world: WorldGraph, vehicle: VehicleState, edge_id: str) -> None:
    """Place a vehicle at the start of an edge it is allowed to traverse."""
    edge = world.edges.get(edge_id)
    if edge is None:
        raise UnknownTarget(edge_id)
    if vehicle.health is not Health.OK:
        raise InvariantViolation(f"vehicle {vehicle.id} is not healthy")
    if edge.mode is not VEHICLE_MODE[vehicle.vclass]:
        raise IncompatibleMode(
            f"{vehicle.vclass.value} {vehicle.id} cannot traverse {edge.mode.value} edge {edge_id}")
    if not edge.open:
        raise EdgeClosed(edge_id)
    if vehicle.at_node != edge.src:
        raise InvariantViolation(
            f"vehicle {vehicle.id} at {vehicle.at_node} cannot enter edge {edge_id} from {edge.src}")
    vehicle.at_node = None
    vehicle.edge = edge_id
    vehicle.edge_ticks = 0


def advance(world: WorldGraph, vehicle: VehicleState, dt: int = 1,
            energy_rate: float = 1.0) -> VehicleState:
    """Move a vehicle along its current edge for dt ticks.

    Energy drains at energy_rate per moving tick; a move that would push
    energy below zero fails the vehicle and raises EnergyExhausted. Reaching
    the far end puts the vehicle at the edge's destination node.
    """
    if vehicle.health is not Health.OK:
        raise InvariantViolation(f"vehicle {vehicle.id} is not healthy")
    if vehicle.edge is None:
        return vehicle
    edge = world.edges[vehicle.edge]
    if edge.mode is not VEHICLE_MODE[vehicle.vclass]:
        raise IncompatibleMode(
            f"{vehicle.vclass.value} {vehicle.id} on {edge.mode.value} edge {edge.id}")
    for _ in range(dt):
        if vehicle.energy - energy_rate < 0:
            vehicle.health = Health.FAILED
            raise EnergyExhausted(vehicle.id)
        vehicle.energy -= energy_rate
        vehicle.edge_ticks += 1
        if vehicle.edge_ticks >= edge.effective_time:
            vehicle.at_node = edge.dst
            vehicle.edge = None
            vehicle.edge_ticks = 0
            break
    return vehicle


class DisturbanceKind(Enum):
    EDGE_CLOSURE = "EdgeClosure"
    VEHICLE_FAILURE = "VehicleFailure"
    DELAY_FACTOR = "DelayFactor"


@dataclass(frozen=True)
class Disturbance:
    kind: DisturbanceKind
    target: str
    start: int
    duration: int = 0  # 0 = permanent
    factor: float = 1.0

    def body(self) -> dict[str, Any]:
        doc = {
            "kind": self.kind.value,
            "target": self.target,
            "start": self.start,
            "duration": self.duration,
        }
        if self.kind is DisturbanceKind.DELAY_FACTOR:
            doc["factor"] = self.factor
        return doc


def parse_disturbance(doc: dict[str, Any]) -> Disturbance:
    try:
        kind = DisturbanceKind(doc["kind"])
        d = Disturbance(
            kind=kind,
            target=str(doc["target"]),
            start=int(doc.get("start", doc.get("tick", 0))),
            duration=int(doc.get("duration", 0)),
            factor=float(doc.get("factor", 1.0)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"bad disturbance entry {doc!r}: {exc}") from exc
    if d.start < 0:
        raise SchemaError("disturbance start must be >= 0")
    if d.kind is DisturbanceKind.DELAY_FACTOR and d.factor <= 1.0:
        raise SchemaError("DelayFactor requires factor > 1")
    return d


class DisturbanceBook:
    """Tracks active timed effects so bounded disturbances reverse exactly."""

    def __init__(self) -> None:
        self._expiries: list[tuple[int, Disturbance]] = []

    def apply(self, world: WorldGraph, vehicles: dict[str, VehicleState],
              d: Disturbance, tick: int) -> dict[str, Any]:
        """Apply a disturbance at its start tick; returns the loggable body."""
        if d.kind is DisturbanceKind.EDGE_CLOSURE:
            edge = world.edges.get(d.target)
            if edge is None:
                raise UnknownTarget(d.target)
            edge.open = False
        elif d.kind is DisturbanceKind.VEHICLE_FAILURE:
            vehicle = vehicles.get(d.target)
            if vehicle is None:
                raise UnknownTarget(d.target)
            vehicle.health = Health.FAILED
        else:
            edge = world.edges.get(d.target)
            if edge is None:
                raise UnknownTarget(d.target)
            edge.delay_factors.append(d.factor)
        if d.duration > 0 and d.kind is not DisturbanceKind.VEHICLE_FAILURE:
            self._expiries.append((tick + d.duration, d))
        return d.body()

    def expire(self, world: WorldGraph, tick: int) -> list[Disturbance]:
        """Reverse every effect whose window ends at this tick."""
        done, keep = [], []
        for when, d in self._expiries:
            (done if when <= tick else keep).append((when, d))
        self._expiries = keep
        for _, d in done:
            if d.kind is DisturbanceKind.EDGE_CLOSURE:
                world.edges[d.target].open = True
            elif d.kind is DisturbanceKind.DELAY_FACTOR:
                factors = world.edges[d.target].delay_factors
                if d.factor in factors:
                    factors.remove(d.factor)
        return [d for _, d in done]
