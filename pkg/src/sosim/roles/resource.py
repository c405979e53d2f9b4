"""Resource holons: the human interface and the vehicle wrappers."""

from __future__ import annotations

from typing import Any

from ..eventlog import EventKind
from ..kernel import Behavior, Envelope, HolonContext
from ..reasoning import EmptyInput, Intent, Report, SubmitMission, preprocess
from ..world import Health

_HISTORY_LIMIT = 16


class HumanAgent(Behavior):
    """Human resource holon: turns a person's requests into mission traffic.

    Free text goes through the intent grammar and the reasoning backend;
    structured submissions (origin/destination already known) skip parsing.
    Status updates and reports flow back in and are kept as the exchange
    history window.
    """

    def __init__(self) -> None:
        self.history: list[dict[str, Any]] = []
        self.last_status = "no active mission"
        self.submitted: list[str] = []

    def on_message(self, ctx: HolonContext, envelope: Envelope) -> None:
        kind = envelope.kind
        if kind == "user_input":
            self._submit(ctx, envelope.payload)
        elif kind in ("status_update", "report"):
            p = envelope.payload
            self.last_status = p.get("phase") or p.get("outcome") or "update"
            self._remember({"kind": kind, **p})
            ctx.log(EventKind.STATE_CHANGED, {
                "entity": ctx.holon_id, "change": "progress_noted",
                "mission_id": p.get("mission_id"), "note": self.last_status,
            })

    def _remember(self, entry: dict[str, Any]) -> None:
        self.history.append(entry)
        del self.history[:-_HISTORY_LIMIT]

    def _submit(self, ctx: HolonContext, p: dict[str, Any]) -> None:
        if p.get("origin") and p.get("destination"):
            self._request_mission(ctx, p.get("mission_id"), p["origin"],
                                  p["destination"], p.get("objective"))
            return
        try:
            command = preprocess(p.get("text", ""), ctx.holon_id, ctx.now)
        except EmptyInput:
            self._echo_unparseable(ctx, "empty input")
            return
        decision = ctx.env.reason(ctx, command,
                                  digest={"last_known_status": self.last_status},
                                  history=self.history)
        if isinstance(decision, SubmitMission):
            self._request_mission(ctx, p.get("mission_id"), decision.origin,
                                  decision.destination, decision.objective)
        elif command.intent is Intent.CANCEL and self.submitted:
            ctx.send(ctx.env.sos_id, "cancel_request",
                     {"mission_id": self.submitted[-1]})
        elif isinstance(decision, Report):
            ctx.log(EventKind.STATE_CHANGED, {
                "entity": ctx.holon_id, "change": "status_reply", "text": decision.text,
            })
        else:
            self._echo_unparseable(ctx, getattr(decision, "reason", "unrecognized"))

    def _request_mission(self, ctx: HolonContext, mission_id: str | None,
                         origin: str, destination: str, objective: Any) -> None:
        mission_id = mission_id or ctx.env.next_mission_id()
        self.submitted.append(mission_id)
        self._remember({"kind": "request", "mission_id": mission_id,
                        "origin": origin, "destination": destination})
        ctx.send(ctx.env.sos_id, "mission_request", {
            "mission_id": mission_id, "origin": origin, "destination": destination,
            "objective": objective, "requester": ctx.holon_id,
        }, correlation_id=mission_id)

    def _echo_unparseable(self, ctx: HolonContext, reason: str) -> None:
        ctx.log(EventKind.STATE_CHANGED, {
            "entity": ctx.holon_id, "change": "unparseable_request", "reason": reason,
        })
        ctx.send(ctx.holon_id, "report",
                 {"error": "UnparseableRequest", "reason": reason})


class VehicleAgent(Behavior):
    """Machine resource holon: periodic state reports to its CS supervisor.

    Reports every tick while busy and every idle interval otherwise, plus
    immediately whenever the busy flag or health changes.
    """

    def __init__(self, vehicle_id: str) -> None:
        self.vehicle_id = vehicle_id
        self._last_report: int | None = None
        self._last_busy: bool | None = None
        self._last_health: str | None = None

    def on_tick(self, ctx: HolonContext) -> None:
        env = ctx.env
        vehicle = env.vehicles[self.vehicle_id]
        busy = vehicle.assigned_task is not None
        interval = (env.options.report_interval_busy if busy
                    else env.options.report_interval_idle)
        changed = busy is not self._last_busy or vehicle.health.value != self._last_health
        due = self._last_report is None or ctx.now - self._last_report >= interval
        if not (changed or due):
            return
        payload = vehicle.summary(env.world)
        payload["available"] = (not busy) and vehicle.health is Health.OK
        ctx.send(env.cs_of[self.vehicle_id], "status_update", payload)
        self._last_report = ctx.now
        self._last_busy = busy
        self._last_health = vehicle.health.value
