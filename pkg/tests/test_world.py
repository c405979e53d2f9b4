import pytest

from sosim.world import (
    Disturbance,
    DisturbanceBook,
    DisturbanceKind,
    EdgeClosed,
    EnergyExhausted,
    Health,
    IncompatibleMode,
    InvariantViolation,
    SchemaError,
    UnknownTarget,
    VehicleClass,
    VehicleState,
    advance,
    begin_edge,
    load_world,
)


def tiny_world():
    return load_world({
        "nodes": [
            {"id": "X", "pos": [0, 0, 0], "kind": "GroundJunction"},
            {"id": "P1G", "pos": [2, 0, 0], "kind": "TransferPad"},
            {"id": "P1A", "pos": [2, 0, 50], "kind": "TransferPad"},
            {"id": "P2A", "pos": [8, 0, 50], "kind": "TransferPad"},
            {"id": "P2G", "pos": [8, 0, 0], "kind": "TransferPad"},
            {"id": "Y", "pos": [10, 0, 0], "kind": "GroundJunction"},
        ],
        "edges": [
            {"id": "E1", "from": "X", "to": "P1G", "mode": "Drive", "base_time": 3, "cost": 3},
            {"id": "E2", "from": "P1G", "to": "P1A", "mode": "Transfer", "base_time": 2, "cost": 0},
            {"id": "E3", "from": "P1A", "to": "P2A", "mode": "Fly", "base_time": 4, "cost": 8},
            {"id": "E4", "from": "P2A", "to": "P2G", "mode": "Transfer", "base_time": 2, "cost": 0},
            {"id": "E5", "from": "P2G", "to": "Y", "mode": "Drive", "base_time": 3, "cost": 3},
        ],
    })


def test_load_world_demoish_graph_has_pads():
    world = tiny_world()
    assert len([n for n in world.nodes.values() if n.kind.value == "TransferPad"]) >= 2


def test_drive_edge_between_air_waypoints_rejected():
    with pytest.raises(InvariantViolation):
        load_world({
            "nodes": [
                {"id": "A", "pos": [0, 0, 50], "kind": "AirWaypoint"},
                {"id": "B", "pos": [1, 0, 50], "kind": "AirWaypoint"},
            ],
            "edges": [
                {"id": "E", "from": "A", "to": "B", "mode": "Drive", "base_time": 1, "cost": 0},
            ],
        })


def test_empty_node_list_is_schema_error():
    with pytest.raises(SchemaError):
        load_world({"nodes": [], "edges": []})


def test_transfer_edge_requires_pad_endpoint():
    with pytest.raises(InvariantViolation):
        load_world({
            "nodes": [
                {"id": "A", "pos": [0, 0, 0], "kind": "GroundJunction"},
                {"id": "B", "pos": [0, 0, 50], "kind": "AirWaypoint"},
            ],
            "edges": [
                {"id": "T", "from": "A", "to": "B", "mode": "Transfer", "base_time": 2, "cost": 0},
            ],
        })


def test_bidirectional_expands_reverse_edge():
    world = load_world({
        "nodes": [
            {"id": "A", "pos": [0, 0, 0], "kind": "GroundJunction"},
            {"id": "B", "pos": [1, 0, 0], "kind": "GroundJunction"},
        ],
        "edges": [
            {"id": "E", "from": "A", "to": "B", "mode": "Drive", "base_time": 2,
             "cost": 1, "bidirectional": True},
        ],
    })
    assert world.edges["E~"].src == "B" and world.edges["E~"].dst == "A"


def test_ugv_completes_drive_edge_in_base_time():
    world = tiny_world()
    v = VehicleState(id="m1", vclass=VehicleClass.UGV, at_node="X")
    begin_edge(world, v, "E1")
    advance(world, v, 5)
    assert v.at_node == "P1G" and v.edge is None


def test_ugv_rejected_from_fly_edge():
    world = tiny_world()
    v = VehicleState(id="m1", vclass=VehicleClass.UGV, at_node="P1A")
    with pytest.raises(IncompatibleMode):
        begin_edge(world, v, "E3")


def test_energy_ledger_exhaustion():
    # Hand trace at rate 1/tick: 3 -> 2 -> 1 -> 0, then the 4th moving tick
    # would go below zero, so the vehicle fails exactly there.
    world = tiny_world()
    v = VehicleState(id="u1", vclass=VehicleClass.UAV, at_node="P1A", energy=3)
    begin_edge(world, v, "E3")
    advance(world, v, 3)
    assert v.energy == 0 and v.health is Health.OK
    with pytest.raises(EnergyExhausted):
        advance(world, v, 1)
    assert v.health is Health.FAILED


def test_closed_edge_cannot_be_entered():
    world = tiny_world()
    world.edges["E1"].open = False
    v = VehicleState(id="m1", vclass=VehicleClass.UGV, at_node="X")
    with pytest.raises(EdgeClosed):
        begin_edge(world, v, "E1")


def test_delay_factor_doubles_traversal():
    world = tiny_world()
    book = DisturbanceBook()
    body = book.apply(world, {}, Disturbance(
        kind=DisturbanceKind.DELAY_FACTOR, target="E1", start=0, duration=0, factor=2.0), 0)
    assert body["kind"] == "DelayFactor"
    assert world.edges["E1"].effective_time == 6  # ceil(3 * 2.0)
    v = VehicleState(id="m1", vclass=VehicleClass.UGV, at_node="X")
    begin_edge(world, v, "E1")
    advance(world, v, 5)
    assert v.edge == "E1"
    advance(world, v, 1)
    assert v.at_node == "P1G"


def test_closure_restores_exactly_at_start_plus_duration():
    world = tiny_world()
    book = DisturbanceBook()
    book.apply(world, {}, Disturbance(
        kind=DisturbanceKind.EDGE_CLOSURE, target="E3", start=10, duration=5), 10)
    assert world.edges["E3"].open is False
    assert book.expire(world, 14) == []
    assert world.edges["E3"].open is False
    restored = book.expire(world, 15)
    assert [d.target for d in restored] == ["E3"]
    assert world.edges["E3"].open is True


def test_vehicle_failure_disturbance():
    world = tiny_world()
    vehicles = {"m1": VehicleState(id="m1", vclass=VehicleClass.UGV, at_node="X")}
    DisturbanceBook().apply(world, vehicles, Disturbance(
        kind=DisturbanceKind.VEHICLE_FAILURE, target="m1", start=0), 0)
    assert vehicles["m1"].health is Health.FAILED


def test_unknown_disturbance_target():
    world = tiny_world()
    with pytest.raises(UnknownTarget):
        DisturbanceBook().apply(world, {}, Disturbance(
            kind=DisturbanceKind.EDGE_CLOSURE, target="E99", start=0), 0)
