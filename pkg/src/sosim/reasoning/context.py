"""Role-aware prompt context assembly with a hard rendered-size budget."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any

from ..errors import SosimError
from ..eventlog import canonical_json
from ..kernel import HolonDescriptor
from .grammar import Command


class MissingTemplate(SosimError):
    pass


DEFAULT_HISTORY_K = 4
DEFAULT_BUDGET = 4000

_templates_cache: dict[str, dict[str, str]] | None = None


def load_templates() -> dict[str, dict[str, str]]:
    """Role template registry shipped with the package (one per role)."""
    global _templates_cache
    if _templates_cache is None:
        with resources.files("sosim.data").joinpath("role_templates.json").open("r") as fp:
            _templates_cache = json.load(fp)
    return _templates_cache


@dataclass(frozen=True)
class PromptContext:
    """Everything a backend may see: the holon's own view, nothing else."""

    role_template: str
    command: dict[str, Any]
    holon_summary: dict[str, Any]
    world_digest: dict[str, Any]
    history: tuple[dict[str, Any], ...] = ()
    budget: int = DEFAULT_BUDGET

    def rendered(self) -> str:
        return canonical_json(self.to_wire())

    def to_wire(self) -> dict[str, Any]:
        return {
            "role_template": self.role_template,
            "command": self.command,
            "holon_summary": self.holon_summary,
            "world_digest": self.world_digest,
            "history": list(self.history),
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "PromptContext":
        return PromptContext(
            role_template=doc["role_template"],
            command=doc.get("command", {}),
            holon_summary=doc.get("holon_summary", {}),
            world_digest=doc.get("world_digest", {}),
            history=tuple(doc.get("history", [])),
        )


def build_context(command: Command | dict[str, Any], descriptor: HolonDescriptor,
                  digest: dict[str, Any],
                  history: list[dict[str, Any]] | tuple[dict[str, Any], ...] = (),
                  k: int = DEFAULT_HISTORY_K,
                  budget: int = DEFAULT_BUDGET,
                  templates: dict[str, dict[str, str]] | None = None) -> PromptContext:
    """Assemble the prompt context for one decision.

    Only this holon's descriptor, its last k exchanges, and the digest it
    was handed are included. When the rendered size exceeds the budget, the
    oldest history entries are dropped first.
    """
    templates = templates if templates is not None else load_templates()
    entry = templates.get(descriptor.role.value)
    if entry is None:
        raise MissingTemplate(descriptor.role.value)
    command_digest = command.digest() if isinstance(command, Command) else dict(command)
    window = list(history)[-k:]
    ctx = PromptContext(
        role_template=entry["id"],
        command=command_digest,
        holon_summary=descriptor.summary(),
        world_digest=digest,
        history=tuple(window),
        budget=budget,
    )
    while len(ctx.rendered()) > budget and window:
        window = window[1:]
        ctx = PromptContext(
            role_template=ctx.role_template,
            command=ctx.command,
            holon_summary=ctx.holon_summary,
            world_digest=ctx.world_digest,
            history=tuple(window),
            budget=budget,
        )
    return ctx
