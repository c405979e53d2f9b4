"""Governance modes derived from the system-of-systems management taxonomy.

Directed: central management assigns resources, no rejection possible.
Acknowledged: central proposals, the owning supervisor may reject once.
Collaborative: assignment only via call-for-proposal bidding.
Virtual has no agreed goal, so no mission protocol applies; it is rejected
at construction.
"""

from __future__ import annotations

from enum import Enum

from ..errors import SosimError


class UnsupportedGovernance(SosimError):
    pass


class GovernanceMode(Enum):
    DIRECTED = "Directed"
    ACKNOWLEDGED = "Acknowledged"
    COLLABORATIVE = "Collaborative"


def parse_governance(value: str | GovernanceMode) -> GovernanceMode:
    if isinstance(value, GovernanceMode):
        return value
    text = str(value).strip().capitalize()
    if text == "Virtual":
        raise UnsupportedGovernance(
            "Virtual systems share no agreed goal; no mission protocol applies")
    try:
        return GovernanceMode(text)
    except ValueError as exc:
        raise UnsupportedGovernance(f"unknown governance mode {value!r}") from exc
