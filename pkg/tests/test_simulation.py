import copy

import pytest

from sosim.eventlog import EventKind
from sosim.runner import run_scenario
from sosim.scenario import SpecError, load_scenario
from sosim.simulation import Simulation

from helpers import (
    assert_capacity_one,
    assert_no_closed_edge_traversed,
    changes,
    demo_scenario_doc,
    mission_outcomes,
    sent,
    task_events,
)


@pytest.fixture()
def demo_doc():
    return demo_scenario_doc()


def top_level_kind_sequence(records):
    created = {}
    for r in task_events(records):
        tid = r.body["task_id"]
        if r.body.get("created") and "." not in tid and ".r" not in tid:
            created[tid] = r.body["kind"]
    return [created[tid] for tid in sorted(created)]


def test_demo_mission_completes_with_drive_fly_drive(demo_doc):
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    assert top_level_kind_sequence(result.records) == [
        "Drive", "Transfer", "Fly", "Transfer", "Drive"]


def test_demo_micro_subplans_share_one_resource(demo_doc):
    result = run_scenario(demo_doc)
    by_subplan = {}
    for r in task_events(records := result.records):
        b = r.body
        if "." in b["task_id"] and b.get("assigned_resource"):
            by_subplan.setdefault(b["plan_id"], set()).add(b["assigned_resource"])
    assert by_subplan  # micro plans exist
    for plan_id, resources in by_subplan.items():
        assert len(resources) == 1, f"{plan_id} used {resources}"
    # First drive leg expands into two micro tasks.
    first = [r.body["task_id"] for r in task_events(records)
             if r.body["task_id"].startswith("M001-T1.") and r.body.get("created")]
    assert first == ["M001-T1.1", "M001-T1.2"]


def test_demo_final_leg_on_a_different_vehicle(demo_doc):
    result = run_scenario(demo_doc)
    awards = {r.body["task_id"]: r.body["resource"]
              for r in changes(result.records, "leg_award")}
    assert awards["M001-T1"] == "m1"
    assert awards["M001-T5"] == "m3"
    assert awards["M001-T1"] != awards["M001-T5"]


def test_demo_replay_is_byte_identical(demo_doc):
    a = run_scenario(demo_doc)
    b = run_scenario(copy.deepcopy(demo_doc))
    assert [r.to_line() for r in a.records] == [r.to_line() for r in b.records]


def test_demo_human_receives_progress_and_final_report(demo_doc):
    result = run_scenario(demo_doc)
    updates = [r.body["payload"].get("phase") for r in sent(result.records, "status_update")
               if r.body["recipient"] == "c1"]
    assert "plan_created" in updates
    assert "plan_activated" in updates
    assert "leg_done" in updates
    assert "completed" in updates
    reports = [r.body["payload"] for r in sent(result.records, "report")
               if r.body["recipient"] == "c1"]
    assert reports and reports[-1]["outcome"] == "completed"
    assert reports[-1]["actual_time"] > 0


def test_passenger_conservation_every_tick(demo_doc):
    spec = load_scenario(demo_doc)
    sim = Simulation(spec)
    for _ in range(spec.horizon):
        sim.step(1)
        for mission_id, pos in sim.passengers.items():
            assert pos["mode"] in ("node", "vehicle", "pad")
            if pos["mode"] in ("node", "pad"):
                assert pos["node"] in sim.world.nodes
                assert pos["vehicle"] is None
            else:
                assert pos["vehicle"] in sim.vehicles
    assert sim.passengers["M001"] == {"mode": "node", "node": "Y", "vehicle": None}


def test_capacity_one_active_leaf_task_per_vehicle(demo_doc):
    demo_doc["missions"].append(
        {"tick": 2, "human": "c1", "origin": "Y", "destination": "X",
         "objective": "fastest"})
    result = run_scenario(demo_doc)
    assert_capacity_one(result.records, result.spec.horizon)
    assert set(mission_outcomes(result.records).values()) == {"mission_completed"}


def test_replan_after_fly_corridor_closure(demo_doc):
    demo_doc["disturbances"] = [
        {"kind": "EdgeClosure", "target": "E3", "start": 15, "duration": 0}]
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    repaired = changes(result.records, "plan_repaired")
    assert repaired and repaired[0].tick >= 15
    replan_awards = [r for r in changes(result.records, "leg_award") if r.body["replan"]]
    assert replan_awards
    disturbance_tick = next(r.tick for r in result.records
                            if r.kind is EventKind.DISTURBANCE_APPLIED)
    assert min(r.tick for r in replan_awards) - disturbance_tick <= 20
    assert_no_closed_edge_traversed(result.records, result.spec.horizon)


def test_replan_on_vehicle_failure_switches_resource(demo_doc):
    # m2 (the only UAV) fails right before its fly leg; the journey must be
    # repaired onto the ground route and still finish.
    demo_doc["disturbances"] = [
        {"kind": "VehicleFailure", "target": "m2", "start": 14}]
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    assert changes(result.records, "plan_repaired")
    # The failed vehicle keeps reporting, flagged unavailable.
    failed_reports = [r.body["payload"] for r in sent(result.records, "status_update")
                      if r.body["sender"] == "m2" and r.tick >= 14]
    assert failed_reports
    assert failed_reports[-1]["available"] is False
    assert failed_reports[-1]["health"] == "Failed"


def test_unused_edge_closure_triggers_no_escalation(demo_doc):
    demo_doc["disturbances"] = [
        {"kind": "EdgeClosure", "target": "E6", "start": 3, "duration": 0}]
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    assert not changes(result.records, "plan_repaired")
    assert not sent(result.records, "escalate")


def test_no_route_after_total_closure_fails_with_report(demo_doc):
    # Close both the fly corridor and the ground detour: no way to reach Y.
    demo_doc["disturbances"] = [
        {"kind": "EdgeClosure", "target": "E3", "start": 12, "duration": 0},
        {"kind": "EdgeClosure", "target": "E7", "start": 12, "duration": 0},
    ]
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_failed"}
    reports = [r.body["payload"] for r in sent(result.records, "report")
               if r.body["recipient"] == "c1"]
    assert reports and reports[-1]["outcome"] == "failed"


def test_directed_mode_emits_no_cfp_or_bid(demo_doc):
    demo_doc["governance"] = "Directed"
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    assert sent(result.records, "cfp", "bid") == []


def test_collaborative_awards_only_to_bidders(demo_doc):
    result = run_scenario(demo_doc)
    bidders_by_cfp = {}
    for r in sent(result.records, "bid"):
        bidders_by_cfp.setdefault(r.body["payload"]["cfp_id"], set()).add(r.body["sender"])
    awards = changes(result.records, "leg_award")
    assert awards
    for award in awards:
        cfp_id = award.body["cfp_id"]
        assert award.body["winner"] in bidders_by_cfp.get(cfp_id, set())


def test_acknowledged_allows_single_rejection_then_distinct_resource(demo_doc):
    # First run finds the tick the proposal reaches S-CS1; the repeat run
    # fails m1 at exactly that tick, forcing one organic rejection.
    demo_doc["governance"] = "Acknowledged"
    probe = run_scenario(copy.deepcopy(demo_doc))
    delivered = [r for r in probe.records
                 if r.kind is EventKind.MESSAGE_DELIVERED and r.body["kind"] == "propose"]
    tick = delivered[0].tick
    demo_doc["vehicles"].append(
        {"id": "m1b", "class": "UGV", "at": "A1", "cs": "S-CS1", "energy": 500})
    demo_doc["disturbances"] = [
        {"kind": "VehicleFailure", "target": "m1", "start": tick}]
    result = run_scenario(demo_doc)
    rejections = changes(result.records, "proposal_rejected")
    assert len(rejections) == 1
    assert rejections[0].body["resource"] == "m1"
    awards = {r.body["task_id"]: r.body["resource"]
              for r in changes(result.records, "leg_award")}
    assert awards["M001-T1"] == "m1b"  # distinct resource after the rejection
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    per_cfp = {}
    for r in rejections:
        per_cfp[r.body["cfp_id"]] = per_cfp.get(r.body["cfp_id"], 0) + 1
    assert all(n <= 1 for n in per_cfp.values())


def test_virtual_governance_rejected(demo_doc):
    demo_doc["governance"] = "Virtual"
    with pytest.raises(Exception) as err:
        load_scenario(demo_doc)
    assert "Virtual" in str(err.value) or "agreed goal" in str(err.value)


def test_no_machine_resources_escalates_no_capacity(demo_doc):
    demo_doc["vehicles"] = []
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_failed"}
    failure = changes(result.records, "mission_failed")[0]
    assert "NoCapacity" in failure.body["reason"]


def test_origin_equals_destination_completes_immediately(demo_doc):
    demo_doc["missions"] = [
        {"tick": 1, "human": "c1", "origin": "X", "destination": "X"}]
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}


def test_unknown_node_in_text_mission_fails_with_report(demo_doc):
    demo_doc["missions"] = [
        {"tick": 1, "human": "c1", "text": "take me from Nowhere to Y"}]
    result = run_scenario(demo_doc)
    assert mission_outcomes(result.records) == {"M001": "mission_failed"}


def test_gibberish_text_is_echoed_unparseable(demo_doc):
    demo_doc["missions"] = [{"tick": 1, "human": "c1", "text": "sing me a song"}]
    result = run_scenario(demo_doc)
    assert changes(result.records, "unparseable_request")
    echoes = [r for r in sent(result.records, "report")
              if r.body["payload"].get("error") == "UnparseableRequest"]
    assert echoes
    assert mission_outcomes(result.records) == {}


def test_scenario_validation_errors(demo_doc):
    bad = copy.deepcopy(demo_doc)
    bad["horizon"] = 0
    with pytest.raises(SpecError):
        load_scenario(bad)
    bad = copy.deepcopy(demo_doc)
    bad["vehicles"][0]["at"] = "nowhere"
    with pytest.raises(SpecError):
        load_scenario(bad)
    bad = copy.deepcopy(demo_doc)
    bad["missions"][0]["human"] = "ghost"
    with pytest.raises(SpecError):
        load_scenario(bad)


def test_centralized_coordinator_completes_demo(demo_doc):
    result = run_scenario(demo_doc, coordinator="centralized")
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    assert sent(result.records, "cfp", "bid") == []
    assert top_level_kind_sequence(result.records) == [
        "Drive", "Transfer", "Fly", "Transfer", "Drive"]


def test_centralized_replans_after_closure(demo_doc):
    demo_doc["disturbances"] = [
        {"kind": "EdgeClosure", "target": "E3", "start": 12, "duration": 0}]
    result = run_scenario(demo_doc, coordinator="centralized")
    assert mission_outcomes(result.records) == {"M001": "mission_completed"}
    assert changes(result.records, "plan_repaired")
    assert_no_closed_edge_traversed(result.records, result.spec.horizon)


def test_machine_reports_follow_intervals(demo_doc):
    # Idle vehicles report every 5 ticks by default; m3 is idle until its
    # leg starts, so its first reports are 5 ticks apart.
    result = run_scenario(demo_doc)
    m3_reports = [r.tick for r in sent(result.records, "status_update")
                  if r.body["sender"] == "m3"][:3]
    assert m3_reports[0] >= 0
    assert m3_reports[1] - m3_reports[0] == 5
    payloads = [r.body["payload"] for r in sent(result.records, "status_update")
                if r.body["sender"] == "m3"]
    assert payloads[0]["available"] is True
    assert payloads[0]["at"] == "P2G"
    # While busy it reports every tick (gap of 1 somewhere in the stream).
    busy_gaps = {b - a for a, b in zip(
        [r.tick for r in sent(result.records, "status_update") if r.body["sender"] == "m3"],
        [r.tick for r in sent(result.records, "status_update") if r.body["sender"] == "m3"][1:])}
    assert 1 in busy_gaps
