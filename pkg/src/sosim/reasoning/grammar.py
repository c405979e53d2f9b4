"""Deterministic intent grammar used by the rule-based reasoner.

This grammar is the reference oracle for command preprocessing. Matching is
case-insensitive on keywords and preserves location tokens verbatim.

Intent table (first match wins, top to bottom):

  Transport    "... from <token> to <token> ..."; optional objective keyword
               anywhere in the text: fastest/quickest/asap -> FastestTime,
               cheapest/cheap/"least expensive"/"lowest cost" -> LowestCost.
  Cancel       contains the word "cancel".
  StatusQuery  contains "status", "where is", "how long", or "eta".
  Unknown      anything else.

Location tokens are single words of [A-Za-z0-9_-]. The raw input is kept
verbatim on the command for audit; only the normalized form is matched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..errors import SosimError
from ..plans import Objective


class EmptyInput(SosimError):
    pass


class Intent(Enum):
    TRANSPORT = "Transport"
    STATUS_QUERY = "StatusQuery"
    CANCEL = "Cancel"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Command:
    raw: str
    source: str
    received_at: int
    intent: Intent
    origin: str | None = None
    destination: str | None = None
    objective: Objective | None = None

    def digest(self) -> dict:
        return {
            "raw": self.raw,
            "source": self.source,
            "received_at": self.received_at,
            "intent": self.intent.value,
            "origin": self.origin,
            "destination": self.destination,
            "objective": self.objective.value if self.objective else None,
        }


_TRANSPORT = re.compile(r"\bfrom\s+(?P<origin>[A-Za-z0-9_-]+)\s+to\s+(?P<dest>[A-Za-z0-9_-]+)",
                        re.IGNORECASE)
_FASTEST = re.compile(r"\b(fastest|quickest|asap)\b", re.IGNORECASE)
_CHEAPEST = re.compile(r"\b(cheapest|cheap|least\s+expensive|lowest\s+cost)\b", re.IGNORECASE)
_CANCEL = re.compile(r"\bcancel\b", re.IGNORECASE)
_STATUS = re.compile(r"\b(status|where\s+is|how\s+long|eta)\b", re.IGNORECASE)


def preprocess(raw: str, source: str, tick: int) -> Command:
    """Normalize whitespace and extract intent plus any location tokens."""
    if raw is None or not raw.strip():
        raise EmptyInput("command text is empty")
    text = " ".join(raw.split())

    m = _TRANSPORT.search(text)
    if m:
        objective = None
        if _FASTEST.search(text):
            objective = Objective.FASTEST_TIME
        elif _CHEAPEST.search(text):
            objective = Objective.LOWEST_COST
        return Command(raw=raw, source=source, received_at=tick, intent=Intent.TRANSPORT,
                       origin=m.group("origin"), destination=m.group("dest"),
                       objective=objective)
    if _CANCEL.search(text):
        return Command(raw=raw, source=source, received_at=tick, intent=Intent.CANCEL)
    if _STATUS.search(text):
        return Command(raw=raw, source=source, received_at=tick, intent=Intent.STATUS_QUERY)
    return Command(raw=raw, source=source, received_at=tick, intent=Intent.UNKNOWN)
