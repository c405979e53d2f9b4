"""Contract-net records and winner selection for leg assignment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import SosimError
from .plans import Objective


class NoBids(SosimError):
    pass


@dataclass(frozen=True)
class CallForProposal:
    cfp_id: str
    mission_id: str
    leg: dict[str, Any]  # origin, destination, mode, edges, earliest_start
    deadline: int

    def body(self) -> dict[str, Any]:
        return {"cfp_id": self.cfp_id, "mission_id": self.mission_id,
                "leg": self.leg, "deadline": self.deadline}


@dataclass(frozen=True)
class Bid:
    cfp_id: str
    bidder: str
    est_time: int
    est_cost: float
    valid_until: int
    resource: str | None = None

    def body(self) -> dict[str, Any]:
        return {"cfp_id": self.cfp_id, "bidder": self.bidder, "est_time": self.est_time,
                "est_cost": self.est_cost, "valid_until": self.valid_until,
                "resource": self.resource}


@dataclass(frozen=True)
class Award:
    cfp_id: str
    winner: str
    assigned_resource: str | None
    leg: dict[str, Any] = field(default_factory=dict)

    def body(self) -> dict[str, Any]:
        return {"cfp_id": self.cfp_id, "winner": self.winner,
                "assigned_resource": self.assigned_resource, "leg": self.leg}


def bid_score(bid: Bid, objective: Objective) -> float:
    return float(bid.est_time) if objective is Objective.FASTEST_TIME else float(bid.est_cost)


def select_winner(bids: list[Bid], objective: Objective) -> Bid:
    """Lowest score wins; equal scores go to the lexicographically first bidder."""
    if not bids:
        raise NoBids("no bids to select from")
    return min(bids, key=lambda b: (bid_score(b, objective), b.bidder))


def negotiate(cfp: CallForProposal, bids: list[Bid], objective: Objective) -> Award:
    """Resolve a CFP at its deadline. Stale bids (expired validity) are dropped."""
    valid = [b for b in bids if b.valid_until >= cfp.deadline and b.cfp_id == cfp.cfp_id]
    if not valid:
        raise NoBids(f"no valid bids for {cfp.cfp_id}")
    best = select_winner(valid, objective)
    return Award(cfp_id=cfp.cfp_id, winner=best.bidder,
                 assigned_resource=best.resource, leg=dict(cfp.leg))
