"""Decision backends: the deterministic rule engine and the remote LLM client.

The rule-based engine is the default and the only backend allowed in
deterministic runs; it is a pure function of the prompt context. The remote
client posts the rendered context to an HTTP endpoint and parses the reply
through the strict decision contract; after max_retries failures it falls
back to the rule engine (when enabled) so a flaky backend degrades to
deterministic behavior instead of an error.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

import httpx

from ..errors import SosimError
from ..negotiation import Bid, select_winner
from ..plans import Objective, parse_objective
from .context import PromptContext
from .decision import (
    AwardLeg,
    BuildPlan,
    Decision,
    DecisionUnparseable,
    Escalate,
    Report,
    SubmitBid,
    SubmitMission,
    parse_decision,
)
from .grammar import Intent


class BackendTimeout(SosimError):
    pass


class BackendKind(Enum):
    RULE_BASED = "RuleBased"
    REMOTE_LLM = "RemoteLLM"


@dataclass(frozen=True)
class BackendConfig:
    kind: BackendKind = BackendKind.RULE_BASED
    endpoint: str | None = None
    api_key: str | None = None
    timeout_ms: int = 5000
    max_retries: int = 2
    fallback_to_rule_based: bool = True
    # Test hook: an httpx transport (e.g. MockTransport) used instead of the network.
    transport: Any = None

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise SosimError("backend timeout must be > 0")
        if self.kind is BackendKind.REMOTE_LLM and not self.endpoint:
            raise SosimError("RemoteLLM backend requires an endpoint")


def backend_from_env(environ: dict[str, str] | None = None) -> BackendConfig:
    """SOSIM_LLM_ENDPOINT/SOSIM_LLM_API_KEY select the remote backend; unset means rules."""
    environ = environ if environ is not None else dict(os.environ)
    endpoint = environ.get("SOSIM_LLM_ENDPOINT")
    if not endpoint:
        return BackendConfig(kind=BackendKind.RULE_BASED)
    return BackendConfig(kind=BackendKind.REMOTE_LLM, endpoint=endpoint,
                         api_key=environ.get("SOSIM_LLM_API_KEY"))


def rule_based_decide(context: PromptContext) -> Decision:
    """Pure decision function over the prompt context.

    Dispatches on the command intent and the digest shape the communication
    layer prepared; every path is deterministic.
    """
    intent = context.command.get("intent")
    digest = context.world_digest

    if intent == Intent.TRANSPORT.value:
        return SubmitMission(
            origin=context.command["origin"],
            destination=context.command["destination"],
            objective=context.command.get("objective"),
        )
    if intent == Intent.STATUS_QUERY.value:
        return Report(text=str(digest.get("last_known_status", "no active mission")))
    if intent == Intent.CANCEL.value:
        return Escalate(reason="cancel requested")

    ask = context.command.get("ask")
    if ask == "build_plan":
        return BuildPlan(mission_id=context.command["mission_id"])
    if ask == "bid":
        candidates = digest.get("candidates") or []
        if not candidates:
            return Report(text="no feasible vehicle")
        objective = parse_objective(digest.get("objective", "fastest"))
        key = "est_time" if objective is Objective.FASTEST_TIME else "est_cost"
        best = min(candidates, key=lambda c: (c[key], c["resource"]))
        return SubmitBid(est_time=int(best["est_time"]), est_cost=float(best["est_cost"]),
                         cfp_id=context.command.get("cfp_id"), resource=best["resource"])
    if ask == "award":
        bids = [Bid(**b) for b in digest.get("bids", [])]
        if not bids:
            return Escalate(reason="no bids received")
        objective = parse_objective(digest.get("objective", "fastest"))
        best = select_winner(bids, objective)
        return AwardLeg(cfp_id=best.cfp_id, winner=best.bidder, resource=best.resource)
    if ask == "blocked":
        return Escalate(reason=str(digest.get("reason", "route blocked")))

    return Escalate(reason="unrecognized intent")


def decide(context: PromptContext, backend: BackendConfig,
           on_event: Callable[[str, str], None] | None = None) -> Decision:
    """Produce a Decision via the configured backend.

    With fallback enabled this never raises DecisionUnparseable: a backend
    that times out or returns garbage max_retries+1 times degrades to the
    rule engine, reporting "fallback_used" through on_event.
    """
    if backend.kind is BackendKind.RULE_BASED:
        return rule_based_decide(context)

    failure: Exception | None = None
    for _ in range(backend.max_retries + 1):
        try:
            response = _post(context, backend)
        except BackendTimeout as exc:
            failure = exc
            continue
        try:
            return parse_decision(response)
        except DecisionUnparseable as exc:
            failure = exc
            continue
    if backend.fallback_to_rule_based:
        if on_event is not None:
            on_event("fallback_used", str(failure))
        return rule_based_decide(context)
    if isinstance(failure, BackendTimeout):
        raise failure
    raise DecisionUnparseable(str(failure))


def _post(context: PromptContext, backend: BackendConfig) -> str:
    request = {
        "template": context.role_template,
        "context": context.to_wire(),
        "schema": "decision.v1",
    }
    headers = {}
    if backend.api_key:
        headers["Authorization"] = f"Bearer {backend.api_key}"
    try:
        with httpx.Client(transport=backend.transport,
                          timeout=backend.timeout_ms / 1000.0) as client:
            reply = client.post(backend.endpoint, json=request, headers=headers)
    except httpx.TimeoutException as exc:
        raise BackendTimeout(str(exc)) from exc
    except httpx.HTTPError as exc:
        raise BackendTimeout(f"transport error: {exc}") from exc
    if reply.status_code != 200:
        raise BackendTimeout(f"backend status {reply.status_code}")
    return reply.text


__all__ = [
    "BackendConfig", "BackendKind", "BackendTimeout", "backend_from_env",
    "decide", "rule_based_decide",
]
