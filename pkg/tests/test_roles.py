import pytest

from sosim.negotiation import Award, Bid, CallForProposal, NoBids, negotiate, select_winner
from sosim.plans import Objective
from sosim.roles.governance import GovernanceMode, UnsupportedGovernance, parse_governance
from sosim.roles.fleet import available_modes
from sosim.world import EdgeMode, Health, VehicleClass, VehicleState


def bid(bidder, t, c, valid=99, resource=None, cfp="cfp-1"):
    return Bid(cfp_id=cfp, bidder=bidder, est_time=t, est_cost=c,
               valid_until=valid, resource=resource)


CFP = CallForProposal(cfp_id="cfp-1", mission_id="M1",
                      leg={"origin": "X", "destination": "Y", "mode": "Drive",
                           "est_time": 5, "est_cost": 3}, deadline=10)


def test_negotiate_fastest_time_argmin():
    award = negotiate(CFP, [bid("S-CS1", 10, 1.0), bid("S-CS2", 7, 9.0)],
                      Objective.FASTEST_TIME)
    assert award.winner == "S-CS2"


def test_negotiate_lowest_cost_argmin():
    award = negotiate(CFP, [bid("S-CS1", 10, 1.0), bid("S-CS2", 7, 9.0)],
                      Objective.LOWEST_COST)
    assert award.winner == "S-CS1"


def test_negotiate_single_bid_wins():
    award = negotiate(CFP, [bid("S-CS2", 42, 42.0, resource="m9")], Objective.FASTEST_TIME)
    assert award.winner == "S-CS2" and award.assigned_resource == "m9"


def test_negotiate_tie_breaks_lexicographically():
    award = negotiate(CFP, [bid("S-CS2", 7, 7.0), bid("S-CS1", 7, 7.0)],
                      Objective.FASTEST_TIME)
    assert award.winner == "S-CS1"


def test_negotiate_drops_stale_and_foreign_bids():
    stale = bid("S-CS1", 1, 1.0, valid=9)  # expires before the deadline
    foreign = bid("S-CS3", 1, 1.0, cfp="other")
    award = negotiate(CFP, [stale, foreign, bid("S-CS2", 8, 8.0)], Objective.FASTEST_TIME)
    assert award.winner == "S-CS2"


def test_negotiate_no_bids_raises():
    with pytest.raises(NoBids):
        negotiate(CFP, [], Objective.FASTEST_TIME)
    with pytest.raises(NoBids):
        negotiate(CFP, [bid("S-CS1", 1, 1.0, valid=3)], Objective.FASTEST_TIME)


def test_select_winner_matches_negotiate():
    bids = [bid("S-CS1", 5, 2.0), bid("S-CS2", 5, 1.0)]
    assert select_winner(bids, Objective.LOWEST_COST).bidder == "S-CS2"


def test_award_body_round_trip_fields():
    award = Award(cfp_id="c", winner="w", assigned_resource="m1", leg={"mode": "Drive"})
    assert award.body() == {"cfp_id": "c", "winner": "w",
                            "assigned_resource": "m1", "leg": {"mode": "Drive"}}


def test_parse_governance_modes():
    assert parse_governance("directed") is GovernanceMode.DIRECTED
    assert parse_governance("Collaborative") is GovernanceMode.COLLABORATIVE
    assert parse_governance(GovernanceMode.ACKNOWLEDGED) is GovernanceMode.ACKNOWLEDGED


def test_virtual_governance_unsupported():
    with pytest.raises(UnsupportedGovernance):
        parse_governance("Virtual")
    with pytest.raises(UnsupportedGovernance):
        parse_governance("anarchic")


def test_available_modes_tracks_fleet_health():
    ugv = VehicleState(id="m1", vclass=VehicleClass.UGV, at_node="X")
    uav = VehicleState(id="u1", vclass=VehicleClass.UAV, at_node="A")
    modes = available_modes({"m1": ugv, "u1": uav})
    assert set(modes) == {EdgeMode.TRANSFER, EdgeMode.DRIVE, EdgeMode.FLY}
    uav.health = Health.FAILED
    modes = available_modes({"m1": ugv, "u1": uav})
    assert EdgeMode.FLY not in modes
    assert available_modes({}) == (EdgeMode.TRANSFER,)
