"""Decision variants and the strict wire contract for reasoning backends.

A backend response must be a single JSON object with a "decision" field
naming a known variant plus that variant's fields. Anything else (free
text, unknown variants, unknown or missing fields) is rejected so a
misbehaving backend can never smuggle an action past the parser.
"""

from __future__ import annotations

import json
from dataclasses import MISSING, dataclass, fields
from typing import Any

from ..errors import SosimError


class DecisionUnparseable(SosimError):
    pass


class Decision:
    """Base tag; concrete decisions are frozen dataclasses."""


@dataclass(frozen=True)
class SubmitMission(Decision):
    origin: str
    destination: str
    objective: str | None = None
    mission_id: str | None = None


@dataclass(frozen=True)
class IssueCFP(Decision):
    leg: dict
    mission_id: str | None = None


@dataclass(frozen=True)
class SubmitBid(Decision):
    est_time: int
    est_cost: float
    cfp_id: str | None = None
    resource: str | None = None
    valid_until: int | None = None


@dataclass(frozen=True)
class AwardLeg(Decision):
    cfp_id: str
    winner: str
    resource: str | None = None


@dataclass(frozen=True)
class BuildPlan(Decision):
    mission_id: str


@dataclass(frozen=True)
class AdjustTask(Decision):
    task_id: str
    adjustment: str


@dataclass(frozen=True)
class Report(Decision):
    text: str


@dataclass(frozen=True)
class Escalate(Decision):
    reason: str


_VARIANTS: dict[str, type] = {
    cls.__name__: cls
    for cls in (SubmitMission, IssueCFP, SubmitBid, AwardLeg, BuildPlan,
                AdjustTask, Report, Escalate)
}

_NUMERIC_FIELDS = {"est_time": int, "est_cost": float, "valid_until": int}


def serialize_decision(decision: Decision) -> dict[str, Any]:
    doc: dict[str, Any] = {"decision": type(decision).__name__}
    for f in fields(decision):  # type: ignore[arg-type]
        doc[f.name] = getattr(decision, f.name)
    return doc


def parse_decision(response: str | dict[str, Any]) -> Decision:
    """Parse a backend response into a Decision or raise DecisionUnparseable."""
    if isinstance(response, (str, bytes)):
        try:
            doc = json.loads(response)
        except (json.JSONDecodeError, TypeError) as exc:
            raise DecisionUnparseable(f"not a JSON document: {exc}") from exc
    else:
        doc = response
    if not isinstance(doc, dict):
        raise DecisionUnparseable("response is not an object")
    name = doc.get("decision")
    cls = _VARIANTS.get(name)  # type: ignore[arg-type]
    if cls is None:
        raise DecisionUnparseable(f"unknown decision variant {name!r}")
    decl = {f.name: f for f in fields(cls)}
    extra = set(doc) - set(decl) - {"decision"}
    if extra:
        raise DecisionUnparseable(f"unknown fields for {name}: {sorted(extra)}")
    kwargs: dict[str, Any] = {}
    for fname, f in decl.items():
        if fname in doc:
            value = doc[fname]
            conv = _NUMERIC_FIELDS.get(fname)
            if conv is not None and value is not None:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise DecisionUnparseable(f"field {fname} must be a number")
                value = conv(value)
            kwargs[fname] = value
        elif f.default is MISSING:
            raise DecisionUnparseable(f"missing required field {fname} for {name}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise DecisionUnparseable(str(exc)) from exc
