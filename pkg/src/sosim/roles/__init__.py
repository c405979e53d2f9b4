"""Specialized holon behaviors and the supervisor negotiation protocol."""

from ..negotiation import Award, Bid, CallForProposal, NoBids, negotiate, select_winner
from .governance import GovernanceMode, UnsupportedGovernance, parse_governance
from .fleet import leg_candidates
from .supervisor import CsSupervisor, NoCapacity, SosSupervisor
from .planner import MissionPlanner
from .task import TaskExecutor
from .resource import HumanAgent, VehicleAgent

__all__ = [
    "Award", "Bid", "CallForProposal", "CsSupervisor", "GovernanceMode",
    "HumanAgent", "MissionPlanner", "NoBids", "NoCapacity", "SosSupervisor",
    "TaskExecutor", "UnsupportedGovernance", "VehicleAgent", "leg_candidates",
    "negotiate", "parse_governance", "select_winner",
]
