"""Supervisor behaviors: mission coordination and leg assignment.

The root supervisor receives mission requests, delegates route planning to
a per-mission planner holon, and resolves one assignment per locomotion
leg according to the governance mode: call-for-proposal bidding under
Collaborative, direct central computation under Directed, and
propose-then-confirm (one rejection allowed) under Acknowledged.
Constituent-system supervisors price legs against their own fleet and
carry out awards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import SosimError
from ..eventlog import EventKind
from ..kernel import Behavior, Envelope, HolonContext, HolonDescriptor, HolonRole
from ..negotiation import Bid, CallForProposal, NoBids, negotiate
from ..plans import Objective, parse_objective
from ..reasoning import AwardLeg, BuildPlan, SubmitBid
from ..world import Health
from .fleet import best_candidate, leg_candidates
from .governance import GovernanceMode


class NoCapacity(SosimError):
    pass


@dataclass
class _LegState:
    cfp_id: str
    task_id: str
    leg: dict[str, Any]
    deadline: int = 0
    state: str = "new"  # new|cfp_open|proposed|awaiting_ack|assigned|failed
    bids: list[Bid] = field(default_factory=list)
    attempts: int = 0
    rejections: int = 0
    rejected_resources: set[str] = field(default_factory=set)
    winner: str | None = None
    resource: str | None = None
    replan: bool = False


@dataclass
class _Mission:
    mission_id: str
    requester: str
    origin: str
    destination: str
    objective: Objective
    received_at: int
    planner: str | None = None
    plan_id: str | None = None
    promised_time: int = 0
    legs: dict[str, _LegState] = field(default_factory=dict)
    state: str = "received"  # received|planning|assigning|active|done|failed
    revision: int = 0


class SosSupervisor(Behavior):
    """Root coordinator: one instance supervises the whole system of systems."""

    def __init__(self) -> None:
        self.missions: dict[str, _Mission] = {}
        self._commitments: dict[str, tuple[int, str]] = {}  # central ledger
        self._cfp_seq = 0

    # -- message handling ---------------------------------------------

    def on_message(self, ctx: HolonContext, envelope: Envelope) -> None:
        kind = envelope.kind
        if kind == "mission_request":
            self._handle_mission_request(ctx, envelope)
        elif kind == "plan_ready":
            self._handle_plan_ready(ctx, envelope, replan=False)
        elif kind == "replan_ready":
            self._handle_plan_ready(ctx, envelope, replan=True)
        elif kind == "bid":
            self._handle_bid(ctx, envelope)
        elif kind == "no_bid":
            pass  # a declined CFP needs no action; the deadline decides
        elif kind == "award_ack":
            self._handle_award_ack(ctx, envelope)
        elif kind == "accept":
            self._handle_accept(ctx, envelope)
        elif kind == "reject":
            self._handle_reject(ctx, envelope)
        elif kind == "plan_completed":
            self._handle_plan_completed(ctx, envelope)
        elif kind == "plan_failed":
            self._handle_plan_failed(ctx, envelope)
        elif kind == "cancel_request":
            self._handle_cancel(ctx, envelope)

    def on_tick(self, ctx: HolonContext) -> None:
        # Collaborative deadlines: resolve every CFP that expires this tick.
        for mission in list(self.missions.values()):
            if mission.state != "assigning":
                continue
            for leg in list(mission.legs.values()):
                if leg.state == "cfp_open" and ctx.now >= leg.deadline:
                    self._resolve_cfp(ctx, mission, leg)

    # -- mission intake -------------------------------------------------

    def _handle_mission_request(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        mission_id = p["mission_id"]
        objective = parse_objective(p.get("objective") or "fastest")
        mission = _Mission(
            mission_id=mission_id,
            requester=p.get("requester", envelope.sender),
            origin=p["origin"],
            destination=p["destination"],
            objective=objective,
            received_at=ctx.now,
        )
        self.missions[mission_id] = mission
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission_id, "change": "mission_received",
            "origin": mission.origin, "destination": mission.destination,
            "objective": objective.value, "requester": mission.requester,
        })
        decision = ctx.env.reason(ctx, {"ask": "build_plan", "mission_id": mission_id},
                                  digest={"origin": mission.origin,
                                          "destination": mission.destination})
        if not isinstance(decision, BuildPlan):
            self._fail_mission(ctx, mission, f"coordinator declined: {decision}")
            return
        mission.state = "planning"
        planner_id = f"{mission_id}-planner"
        mission.planner = planner_id
        from .planner import MissionPlanner  # local import: planner spawns tasks
        ctx.spawn(HolonDescriptor(id=planner_id, role=HolonRole.PLANNER,
                                  parent=ctx.holon_id),
                  MissionPlanner())
        ctx.send(planner_id, "build_plan", {
            "mission_id": mission_id,
            "origin": mission.origin,
            "destination": mission.destination,
            "objective": objective.value,
            "requester": mission.requester,
        }, correlation_id=mission_id)

    # -- assignment rounds -----------------------------------------------

    def _handle_plan_ready(self, ctx: HolonContext, envelope: Envelope, replan: bool) -> None:
        p = envelope.payload
        mission = self.missions.get(p["mission_id"])
        if mission is None or mission.state in ("done", "failed"):
            return
        mission.plan_id = p["plan_id"]
        mission.revision = int(p.get("revision", 0))
        if not replan:
            mission.promised_time = int(p.get("promised_time", 0))
        legs = p.get("legs", [])
        if not legs:
            mission.state = "active"
            ctx.send(envelope.sender, "activate_plan",
                     {"mission_id": mission.mission_id, "assignments": {},
                      "revision": p.get("revision", 0)},
                     correlation_id=mission.mission_id)
            return
        mission.state = "assigning"
        for leg in legs:
            self._cfp_seq += 1
            state = _LegState(cfp_id=f"{mission.mission_id}-L{self._cfp_seq}",
                              task_id=leg["task_id"], leg=leg, replan=replan)
            mission.legs[state.cfp_id] = state
            self._open_assignment(ctx, mission, state)

    def _open_assignment(self, ctx: HolonContext, mission: _Mission, leg: _LegState) -> None:
        leg.attempts += 1
        mode = ctx.env.governance
        if mode is GovernanceMode.COLLABORATIVE:
            leg.deadline = ctx.now + ctx.env.options.bid_window
            leg.state = "cfp_open"
            leg.bids = []
            cfp = CallForProposal(cfp_id=leg.cfp_id, mission_id=mission.mission_id,
                                  leg=leg.leg, deadline=leg.deadline)
            body = cfp.body()
            body["objective"] = mission.objective.value
            ctx.send("role:Supervisor", "cfp", body, correlation_id=mission.mission_id)
            return
        # Central computation for Directed/Acknowledged.
        candidates = leg_candidates(ctx.env, ctx.now, leg.leg,
                                    sorted(ctx.env.vehicles),
                                    self._commitments)
        candidates = [c for c in candidates if c["resource"] not in leg.rejected_resources]
        choice = best_candidate(candidates, mission.objective)
        if choice is None:
            self._fail_mission(ctx, mission, "NoCapacity: no feasible resource")
            return
        owner = ctx.env.cs_of[choice["resource"]]
        if mode is GovernanceMode.DIRECTED:
            self._commit(ctx, mission, leg, winner=owner, resource=choice["resource"],
                         est_time=choice["est_time"])
            leg.state = "awaiting_ack"
            ctx.send(owner, "award", {
                "cfp_id": leg.cfp_id, "task_id": leg.task_id, "leg": leg.leg,
                "winner": owner, "resource": choice["resource"],
                "est_time": choice["est_time"], "governance": mode.value,
            }, correlation_id=mission.mission_id)
        else:  # Acknowledged: propose, allowing a single rejection
            leg.state = "proposed"
            ctx.send(owner, "propose", {
                "cfp_id": leg.cfp_id, "task_id": leg.task_id, "leg": leg.leg,
                "resource": choice["resource"], "est_time": choice["est_time"],
                "binding": leg.rejections > 0,
            }, correlation_id=mission.mission_id)

    def _handle_bid(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        leg, mission = self._find_leg(p.get("cfp_id"))
        if leg is None or leg.state != "cfp_open":
            return
        leg.bids.append(Bid(cfp_id=p["cfp_id"], bidder=p.get("bidder", envelope.sender),
                            est_time=int(p["est_time"]), est_cost=float(p["est_cost"]),
                            valid_until=int(p["valid_until"]), resource=p.get("resource")))

    def _resolve_cfp(self, ctx: HolonContext, mission: _Mission, leg: _LegState) -> None:
        cfp = CallForProposal(cfp_id=leg.cfp_id, mission_id=mission.mission_id,
                              leg=leg.leg, deadline=leg.deadline)
        digest = {"objective": mission.objective.value,
                  "bids": [b.body() for b in leg.bids]}
        try:
            award = negotiate(cfp, leg.bids, mission.objective)
        except NoBids:
            self._fail_mission(ctx, mission, "NoCapacity: no bids by deadline")
            return
        # The reasoning layer confirms the same argmin over the digest.
        decision = ctx.env.reason(ctx, {"ask": "award"}, digest=digest)
        if isinstance(decision, AwardLeg):
            award_winner, award_resource = decision.winner, decision.resource
        else:
            award_winner, award_resource = award.winner, award.assigned_resource
        self._commit(ctx, mission, leg, winner=award_winner, resource=award_resource,
                     est_time=None)
        leg.state = "awaiting_ack"
        ctx.send(award_winner, "award", {
            "cfp_id": leg.cfp_id, "task_id": leg.task_id, "leg": leg.leg,
            "winner": award_winner, "resource": award_resource,
            "governance": GovernanceMode.COLLABORATIVE.value,
        }, correlation_id=mission.mission_id)

    def _commit(self, ctx: HolonContext, mission: _Mission, leg: _LegState,
                winner: str, resource: str | None, est_time: int | None) -> None:
        leg.winner = winner
        leg.resource = resource
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "leg_award",
            "cfp_id": leg.cfp_id, "task_id": leg.task_id,
            "winner": winner, "resource": resource, "replan": leg.replan,
            "governance": ctx.env.governance.value,
        })
        if est_time is not None and resource is not None:
            free_at, _ = self._commitments.get(resource, (ctx.now, None))
            self._commitments[resource] = (max(ctx.now, free_at) + est_time,
                                           leg.leg["destination"])

    def _handle_award_ack(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        leg, mission = self._find_leg(p.get("cfp_id"))
        if leg is None or mission is None or leg.state != "awaiting_ack":
            return
        if p.get("ok"):
            leg.state = "assigned"
            leg.resource = p.get("resource", leg.resource)
            self._maybe_activate(ctx, mission)
        elif leg.attempts < 2:
            self._open_assignment(ctx, mission, leg)
        else:
            self._fail_mission(ctx, mission, "NoCapacity: award could not be honored")

    def _handle_accept(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        leg, mission = self._find_leg(p.get("cfp_id"))
        if leg is None or mission is None or leg.state != "proposed":
            return
        self._commit(ctx, mission, leg, winner=envelope.sender,
                     resource=p["resource"], est_time=p.get("est_time"))
        leg.state = "assigned"
        self._maybe_activate(ctx, mission)

    def _handle_reject(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        leg, mission = self._find_leg(p.get("cfp_id"))
        if leg is None or mission is None or leg.state != "proposed":
            return
        leg.rejections += 1
        if p.get("resource"):
            leg.rejected_resources.add(p["resource"])
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "proposal_rejected",
            "cfp_id": leg.cfp_id, "resource": p.get("resource"),
            "reason": p.get("reason"),
        })
        if leg.rejections > 1:
            self._fail_mission(ctx, mission, "NoCapacity: proposal rejected twice")
            return
        self._open_assignment(ctx, mission, leg)

    def _maybe_activate(self, ctx: HolonContext, mission: _Mission) -> None:
        open_legs = [l for l in mission.legs.values() if l.state not in ("assigned", "failed")]
        if open_legs or mission.state != "assigning":
            return
        mission.state = "active"
        assignments = {l.task_id: l.resource for l in mission.legs.values()
                       if l.state == "assigned"}
        ctx.send(mission.planner, "activate_plan", {
            "mission_id": mission.mission_id,
            "assignments": assignments,
            "revision": mission.revision,
        }, correlation_id=mission.mission_id)
        mission.legs = {}

    # -- terminal outcomes ------------------------------------------------

    def _handle_plan_completed(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        mission = self.missions.get(p["mission_id"])
        if mission is None or mission.state in ("done", "failed"):
            return
        mission.state = "done"
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "mission_completed",
            "actual_time": p.get("actual_time"), "actual_cost": p.get("actual_cost"),
        })
        ctx.send(mission.requester, "report", {
            "mission_id": mission.mission_id, "outcome": "completed",
            "promised_time": mission.promised_time,
            "actual_time": p.get("actual_time"), "actual_cost": p.get("actual_cost"),
        }, correlation_id=mission.mission_id)

    def _handle_plan_failed(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        mission = self.missions.get(p["mission_id"])
        if mission is None or mission.state in ("done", "failed"):
            return
        self._fail_mission(ctx, mission, p.get("reason", "plan failed"))

    def _handle_cancel(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        mission = self.missions.get(p.get("mission_id") or "")
        if mission is None:
            return
        if mission.state in ("received", "planning", "assigning"):
            if mission.planner and ctx.has_holon(mission.planner):
                ctx.send(mission.planner, "abort_mission",
                         {"mission_id": mission.mission_id, "reason": "cancelled"})
            self._fail_mission(ctx, mission, "cancelled by requester")
        else:
            ctx.send(mission.requester, "report", {
                "mission_id": mission.mission_id, "outcome": "underway",
                "note": "mission already executing; cancellation not applied",
            }, correlation_id=mission.mission_id)

    def _fail_mission(self, ctx: HolonContext, mission: _Mission, reason: str) -> None:
        if mission.state == "failed":
            return
        mission.state = "failed"
        mission.legs = {}
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": mission.mission_id, "change": "mission_failed", "reason": reason,
        })
        ctx.send(mission.requester, "report", {
            "mission_id": mission.mission_id, "outcome": "failed", "reason": reason,
        }, correlation_id=mission.mission_id)

    def _find_leg(self, cfp_id: str | None) -> tuple[_LegState | None, _Mission | None]:
        if cfp_id:
            for mission in self.missions.values():
                leg = mission.legs.get(cfp_id)
                if leg is not None:
                    return leg, mission
        return None, None


class CsSupervisor(Behavior):
    """Constituent-system supervisor: prices and carries out leg assignments."""

    BID_VALIDITY = 50

    def __init__(self, fleet: list[str]) -> None:
        self.fleet = sorted(fleet)
        self.commitments: dict[str, tuple[int, str]] = {}
        self.vehicle_reports: dict[str, dict[str, Any]] = {}
        self._bid_estimates: dict[str, tuple[str, int]] = {}

    def on_message(self, ctx: HolonContext, envelope: Envelope) -> None:
        kind = envelope.kind
        if kind == "cfp":
            self._handle_cfp(ctx, envelope)
        elif kind == "award":
            self._handle_award(ctx, envelope)
        elif kind == "propose":
            self._handle_propose(ctx, envelope)
        elif kind == "status_update":
            self._handle_status(ctx, envelope)

    def _handle_cfp(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        candidates = leg_candidates(ctx.env, ctx.now, p["leg"], self.fleet, self.commitments)
        decision = ctx.env.reason(
            ctx, {"ask": "bid", "cfp_id": p["cfp_id"]},
            digest={"objective": p.get("objective", "fastest"),
                    "candidates": candidates})
        if isinstance(decision, SubmitBid) and decision.resource:
            self._bid_estimates[p["cfp_id"]] = (decision.resource, decision.est_time)
            ctx.send(envelope.sender, "bid", {
                "cfp_id": p["cfp_id"], "bidder": ctx.holon_id,
                "est_time": decision.est_time, "est_cost": decision.est_cost,
                "valid_until": ctx.now + self.BID_VALIDITY,
                "resource": decision.resource,
            }, correlation_id=envelope.correlation_id)
        else:
            ctx.send(envelope.sender, "no_bid",
                     {"cfp_id": p["cfp_id"], "reason": "no feasible vehicle"},
                     correlation_id=envelope.correlation_id)

    def _handle_award(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        resource = p.get("resource")
        directed = p.get("governance") == GovernanceMode.DIRECTED.value
        ok = resource in self.fleet
        if ok and not directed:
            vehicle = ctx.env.vehicles.get(resource)
            ok = vehicle is not None and vehicle.health is Health.OK
        if ok:
            est = p.get("est_time")
            if est is None:
                est = self._bid_estimates.get(p["cfp_id"], (resource, 0))[1]
            free_at, _ = self.commitments.get(resource, (ctx.now, None))
            self.commitments[resource] = (max(ctx.now, free_at) + int(est),
                                          p["leg"]["destination"])
        ctx.send(envelope.sender, "award_ack", {
            "cfp_id": p["cfp_id"], "task_id": p.get("task_id"),
            "resource": resource, "ok": bool(ok),
        }, correlation_id=envelope.correlation_id)

    def _handle_propose(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        resource = p.get("resource")
        vehicle = ctx.env.vehicles.get(resource)
        acceptable = (resource in self.fleet and vehicle is not None
                      and vehicle.health is Health.OK)
        if acceptable or p.get("binding"):
            free_at, _ = self.commitments.get(resource, (ctx.now, None))
            self.commitments[resource] = (max(ctx.now, free_at) + int(p.get("est_time", 0)),
                                          p["leg"]["destination"])
            ctx.send(envelope.sender, "accept", {
                "cfp_id": p["cfp_id"], "resource": resource,
                "est_time": p.get("est_time"),
            }, correlation_id=envelope.correlation_id)
        else:
            ctx.send(envelope.sender, "reject", {
                "cfp_id": p["cfp_id"], "resource": resource,
                "reason": "vehicle unavailable",
            }, correlation_id=envelope.correlation_id)

    def _handle_status(self, ctx: HolonContext, envelope: Envelope) -> None:
        p = envelope.payload
        vid = p.get("id")
        if vid not in self.fleet:
            return
        self.vehicle_reports[vid] = p
        # An idle, healthy vehicle standing at a node resets its commitment.
        if (p.get("assigned_task") is None and p.get("health") == "OK"
                and p.get("at") and not ctx.env.vehicle_queue.get(vid)):
            self.commitments[vid] = (ctx.now, p["at"])
