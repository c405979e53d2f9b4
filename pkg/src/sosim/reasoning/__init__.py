"""Reasoning layer: command preprocessing, context building, decision making."""

from .grammar import Command, EmptyInput, Intent, preprocess
from .context import MissingTemplate, PromptContext, build_context, load_templates
from .decision import (
    AdjustTask,
    AwardLeg,
    BuildPlan,
    Decision,
    DecisionUnparseable,
    Escalate,
    IssueCFP,
    Report,
    SubmitBid,
    SubmitMission,
    parse_decision,
    serialize_decision,
)
from .backends import (
    BackendConfig,
    BackendKind,
    BackendTimeout,
    backend_from_env,
    decide,
    rule_based_decide,
)

__all__ = [
    "AdjustTask", "AwardLeg", "BackendConfig", "BackendKind", "BackendTimeout",
    "BuildPlan", "Command", "Decision", "DecisionUnparseable", "EmptyInput",
    "Escalate", "Intent", "IssueCFP", "MissingTemplate", "PromptContext",
    "Report", "SubmitBid", "SubmitMission", "backend_from_env", "build_context",
    "decide", "load_templates", "parse_decision", "preprocess",
    "rule_based_decide", "serialize_decision",
]
