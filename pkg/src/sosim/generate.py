"""Deterministic random world/scenario generators for suites and benchmarks.

Everything is driven by a caller-supplied seed; the same seed always yields
the same documents, so generated suites participate in replay checks.
"""

from __future__ import annotations

import random
from typing import Any


def random_world(seed: int, n_ground: int = 4, n_air: int = 2, n_pad_pairs: int = 2,
                 p_extra: float = 0.35, max_time: int = 9) -> dict[str, Any]:
    """A layered city graph document: ground chain, air chain, paired pads.

    Ground junctions plus pad ground-sides are chained bidirectionally (so
    any two ground nodes are drive-connected), likewise the air layer; pads
    get two-way transfer edges. Extra random same-layer edges are added with
    probability p_extra per candidate pair.
    """
    rng = random.Random(seed)
    nodes = []
    ground = [f"G{i}" for i in range(n_ground)]
    air = [f"A{i}" for i in range(n_air)]
    pads_g = [f"P{i}G" for i in range(n_pad_pairs)]
    pads_a = [f"P{i}A" for i in range(n_pad_pairs)]
    for i, nid in enumerate(ground):
        nodes.append({"id": nid, "pos": [i * 100.0, 0.0, 0.0], "kind": "GroundJunction"})
    for i, nid in enumerate(air):
        nodes.append({"id": nid, "pos": [i * 100.0, 50.0, 60.0], "kind": "AirWaypoint"})
    for i in range(n_pad_pairs):
        nodes.append({"id": pads_g[i], "pos": [i * 120.0, 30.0, 0.0], "kind": "TransferPad"})
        nodes.append({"id": pads_a[i], "pos": [i * 120.0, 30.0, 60.0], "kind": "TransferPad"})

    edges = []
    counter = {"D": 0, "F": 0, "T": 0}

    def add(prefix: str, src: str, dst: str, mode: str, both: bool = True) -> None:
        eid = f"{prefix}{counter[prefix]}"
        counter[prefix] += 1
        edges.append({
            "id": eid, "from": src, "to": dst, "mode": mode,
            "base_time": rng.randint(1, max_time), "cost": rng.randint(0, 9),
            "bidirectional": both,
        })

    ground_layer = ground + pads_g
    rng.shuffle(ground_layer)
    for a, b in zip(ground_layer, ground_layer[1:]):
        add("D", a, b, "Drive")
    air_layer = air + pads_a
    rng.shuffle(air_layer)
    for a, b in zip(air_layer, air_layer[1:]):
        add("F", a, b, "Fly")
    for gp, ap in zip(pads_g, pads_a):
        add("T", gp, ap, "Transfer")

    for i, a in enumerate(ground_layer):
        for b in ground_layer[i + 1:]:
            if rng.random() < p_extra:
                add("D", a, b, "Drive")
    for i, a in enumerate(air_layer):
        for b in air_layer[i + 1:]:
            if rng.random() < p_extra:
                add("F", a, b, "Fly")
    return {"nodes": nodes, "edges": edges}


def random_scenario(seed: int, n_vehicles: int = 4, n_missions: int = 2,
                    horizon: int = 400, governance: str = "Collaborative",
                    with_disturbance: bool = False,
                    world: dict[str, Any] | None = None) -> dict[str, Any]:
    """A runnable scenario over a random world, with optional disturbances.

    Vehicles are split across two constituent-system supervisors; missions
    go between distinct ground junctions; disturbances (when requested)
    close an edge shortly after the first mission starts.
    """
    rng = random.Random(seed ^ 0x5051)
    world = world or random_world(seed)
    ground = [n["id"] for n in world["nodes"] if n["kind"] == "GroundJunction"]
    pads_g = [n["id"] for n in world["nodes"] if n["kind"] == "TransferPad"
              and n["pos"][2] == 0.0]
    pads_a = [n["id"] for n in world["nodes"] if n["kind"] == "TransferPad"
              and n["pos"][2] != 0.0]
    air = [n["id"] for n in world["nodes"] if n["kind"] == "AirWaypoint"]

    vehicles = []
    ground_spots = ground + pads_g
    air_spots = air + pads_a
    for i in range(n_vehicles):
        if i % 3 == 2 and air_spots:
            vehicles.append({"id": f"v{i:03d}", "class": "UAV",
                             "at": air_spots[i % len(air_spots)],
                             "cs": f"S-CS{(i % 2) + 1}", "energy": 100000})
        else:
            vehicles.append({"id": f"v{i:03d}", "class": "UGV",
                             "at": ground_spots[i % len(ground_spots)],
                             "cs": f"S-CS{(i % 2) + 1}", "energy": 100000})

    missions = []
    for m in range(n_missions):
        origin, dest = rng.sample(ground, 2)
        missions.append({
            "tick": 1 + m * 3,
            "human": "c1",
            "origin": origin,
            "destination": dest,
            "objective": "fastest" if rng.random() < 0.7 else "cheapest",
        })

    disturbances = []
    if with_disturbance:
        edge_ids = [e["id"] for e in world["edges"] if e["mode"] == "Drive"]
        target = edge_ids[rng.randrange(len(edge_ids))]
        disturbances.append({"kind": "EdgeClosure", "target": target,
                             "start": rng.randint(4, 12), "duration": 0})

    return {
        "name": f"random-{seed}",
        "world": world,
        "supervisors": {"sos": "S-SoS", "cs": ["S-CS1", "S-CS2"]},
        "humans": [{"id": "c1"}],
        "vehicles": vehicles,
        "missions": missions,
        "disturbances": disturbances,
        "governance": governance,
        "seed": seed,
        "horizon": horizon,
    }


def grid_world(n_cols: int, n_rows: int, pad_every: int = 3,
               drive_time: int = 3, fly_time: int = 2) -> dict[str, Any]:
    """Regular ground grid with an air lattice over periodic pads.

    Used for the scalability runs: size grows with the grid while structure
    stays predictable.
    """
    nodes = []
    edges = []
    eid = [0]

    def add_edge(src: str, dst: str, mode: str, t: int, cost: float) -> None:
        edges.append({"id": f"E{eid[0]:04d}", "from": src, "to": dst, "mode": mode,
                      "base_time": t, "cost": cost, "bidirectional": True})
        eid[0] += 1

    def gid(c: int, r: int) -> str:
        return f"N{c:02d}x{r:02d}"

    pads = []
    for c in range(n_cols):
        for r in range(n_rows):
            nodes.append({"id": gid(c, r), "pos": [c * 100.0, r * 100.0, 0.0],
                          "kind": "GroundJunction"})
    for c in range(n_cols):
        for r in range(n_rows):
            if c + 1 < n_cols:
                add_edge(gid(c, r), gid(c + 1, r), "Drive", drive_time, 2.0)
            if r + 1 < n_rows:
                add_edge(gid(c, r), gid(c, r + 1), "Drive", drive_time, 2.0)
    for c in range(0, n_cols, pad_every):
        for r in range(0, n_rows, pad_every):
            pg, pa = f"P{c:02d}x{r:02d}G", f"P{c:02d}x{r:02d}A"
            nodes.append({"id": pg, "pos": [c * 100.0 + 50, r * 100.0, 0.0],
                          "kind": "TransferPad"})
            nodes.append({"id": pa, "pos": [c * 100.0 + 50, r * 100.0, 60.0],
                          "kind": "TransferPad"})
            add_edge(gid(c, r), pg, "Drive", 1, 1.0)
            add_edge(pg, pa, "Transfer", 2, 0.0)
            pads.append(pa)
    for a, b in zip(pads, pads[1:]):
        add_edge(a, b, "Fly", fly_time, 5.0)
    return {"nodes": nodes, "edges": edges}


def scale_scenario(n_vehicles: int, n_missions: int, horizon: int,
                   seed: int = 7, governance: str = "Collaborative") -> dict[str, Any]:
    """Scalability scenario: n_vehicles on a grid city, n_missions spread early."""
    rng = random.Random(seed)
    side = 6
    world = grid_world(side, side)
    ground = [n["id"] for n in world["nodes"] if n["kind"] == "GroundJunction"]
    pads_a = [n["id"] for n in world["nodes"] if n["kind"] == "TransferPad"
              and n["pos"][2] != 0.0]
    vehicles = []
    for i in range(n_vehicles):
        if i % 5 == 4 and pads_a:
            vehicles.append({"id": f"v{i:03d}", "class": "UAV",
                             "at": pads_a[i % len(pads_a)],
                             "cs": f"S-CS{(i % 2) + 1}", "energy": 10 ** 6})
        else:
            vehicles.append({"id": f"v{i:03d}", "class": "UGV",
                             "at": ground[(i * 7) % len(ground)],
                             "cs": f"S-CS{(i % 2) + 1}", "energy": 10 ** 6})
    missions = []
    for m in range(n_missions):
        origin, dest = rng.sample(ground, 2)
        missions.append({"tick": 1 + (m % 25) * 4, "human": f"c{(m % 5) + 1}",
                         "origin": origin, "destination": dest, "objective": "fastest"})
    return {
        "name": f"scale-{n_vehicles}v-{n_missions}m",
        "world": world,
        "supervisors": {"sos": "S-SoS", "cs": ["S-CS1", "S-CS2"]},
        "humans": [{"id": f"c{i}"} for i in range(1, 6)],
        "vehicles": vehicles,
        "missions": missions,
        "disturbances": [],
        "governance": governance,
        "seed": seed,
        "horizon": horizon,
    }
