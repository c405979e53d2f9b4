"""Holon lifecycle, registry, logical clock, and deterministic message routing.

The runtime is the communication layer shared by every holon: it owns the
mailboxes, the logical clock, and the event log. Time advances only through
:meth:`Runtime.step`; within a tick, holons are visited in lexicographic id
order and drain the mail that was visible at the start of the tick. Messages
sent during tick t become visible at tick t+1, which keeps delivery order
independent of processing order and makes replays byte-identical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import SosimError
from .eventlog import EventKind, EventLog, EventRecord


class DuplicateId(SosimError):
    pass


class UnknownParent(SosimError):
    pass


class UnknownRecipient(SosimError):
    pass


class SenderRetired(SosimError):
    pass


class UnknownHolon(SosimError):
    pass


class HolonRole(Enum):
    SUPERVISOR = "Supervisor"
    PLANNER = "Planner"
    TASK = "Task"
    HUMAN_RESOURCE = "HumanResource"
    MACHINE_RESOURCE = "MachineResource"


class HolonStatus(Enum):
    IDLE = "Idle"
    BUSY = "Busy"
    FAILED = "Failed"
    RETIRED = "Retired"


ROLE_PREFIX = "role:"

_ROLE_VALUES = {r.value: r for r in HolonRole}


@dataclass
class HolonDescriptor:
    """Identity, role, capabilities, and holarchy position of one holon.

    parent/children links form a forest: a holon has at most one parent and
    the parent must already be registered at spawn time, so cycles cannot
    be created.
    """

    id: str
    role: HolonRole
    capabilities: frozenset[str] = frozenset()
    parent: str | None = None
    children: list[str] = field(default_factory=list)
    status: HolonStatus = HolonStatus.IDLE

    def summary(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "role": self.role.value,
            "capabilities": sorted(self.capabilities),
            "parent": self.parent,
            "children": list(self.children),
            "status": self.status.value,
        }


@dataclass(frozen=True)
class Envelope:
    """A routed message. msg_id is a per-sender monotone counter."""

    msg_id: int
    sender: str
    recipient: str
    sent_at: int
    kind: str
    payload: dict[str, Any] = field(default_factory=dict)
    correlation_id: str | None = None

    def body(self, resolved_recipient: str | None = None) -> dict[str, Any]:
        return {
            "msg_id": self.msg_id,
            "sender": self.sender,
            "recipient": resolved_recipient or self.recipient,
            "selector": self.recipient if resolved_recipient else None,
            "sent_at": self.sent_at,
            "kind": self.kind,
            "payload": self.payload,
            "correlation_id": self.correlation_id,
        }


@dataclass
class LogicalClock:
    """Tick counter; all simulation timing is expressed in ticks."""

    now: int = 0

    def advance(self, n: int = 1) -> int:
        self.now += n
        return self.now


class Behavior:
    """Base behavior binding: execution-control hooks invoked per tick.

    on_tick runs once per tick before the holon's visible mail is drained;
    on_message runs once per delivered envelope. Subclasses override what
    they need.
    """

    def on_spawn(self, ctx: "HolonContext") -> None:
        pass

    def on_tick(self, ctx: "HolonContext") -> None:
        pass

    def on_message(self, ctx: "HolonContext", envelope: Envelope) -> None:
        pass


@dataclass
class _HolonEntry:
    descriptor: HolonDescriptor
    behavior: Behavior
    inbox: deque = field(default_factory=deque)
    staging: deque = field(default_factory=deque)


class HolonContext:
    """Per-holon handle onto the runtime, passed into behavior hooks."""

    def __init__(self, runtime: "Runtime", holon_id: str) -> None:
        self._runtime = runtime
        self.holon_id = holon_id

    @property
    def descriptor(self) -> HolonDescriptor:
        return self._runtime.descriptor(self.holon_id)

    @property
    def now(self) -> int:
        return self._runtime.clock.now

    @property
    def env(self) -> Any:
        return self._runtime.env

    def send(self, recipient: str, kind: str, payload: dict[str, Any] | None = None,
             correlation_id: str | None = None) -> Envelope:
        return self._runtime.send(self.holon_id, recipient, kind, payload, correlation_id)

    def spawn(self, descriptor: HolonDescriptor, behavior: Behavior) -> str:
        return self._runtime.spawn_holon(descriptor, behavior)

    def lookup(self, selector: Any) -> list[str]:
        return self._runtime.lookup(selector)

    def has_holon(self, holon_id: str) -> bool:
        return self._runtime.has_holon(holon_id)

    def log(self, kind: EventKind, body: dict[str, Any]) -> EventRecord:
        return self._runtime.log_event(kind, body)

    def set_status(self, status: HolonStatus) -> None:
        self._runtime.set_status(self.holon_id, status)

    def retire(self, holon_id: str | None = None) -> None:
        self._runtime.retire(holon_id or self.holon_id)


class Runtime:
    """Registry, clock, mailboxes, and the deterministic tick loop.

    ``env`` is an opaque handle set by the embedding application (the
    simulation layer exposes the world, plan store, and options through
    it); the kernel itself never touches it.
    """

    def __init__(self, env: Any = None) -> None:
        self.clock = LogicalClock()
        self.log = EventLog()
        self.env = env
        self._holons: dict[str, _HolonEntry] = {}
        self._msg_counters: dict[str, int] = {}

    # -- registry ----------------------------------------------------

    def spawn_holon(self, descriptor: HolonDescriptor, behavior: Behavior) -> str:
        if descriptor.id in self._holons:
            raise DuplicateId(f"holon id already registered: {descriptor.id}")
        if descriptor.parent is not None:
            parent = self._holons.get(descriptor.parent)
            if parent is None:
                raise UnknownParent(f"parent not registered: {descriptor.parent}")
            if descriptor.id not in parent.descriptor.children:
                parent.descriptor.children.append(descriptor.id)
        entry = _HolonEntry(descriptor=descriptor, behavior=behavior)
        self._holons[descriptor.id] = entry
        self._msg_counters.setdefault(descriptor.id, 0)
        self.log_event(EventKind.STATE_CHANGED, {
            "entity": descriptor.id,
            "change": "spawned",
            "role": descriptor.role.value,
            "parent": descriptor.parent,
            "capabilities": sorted(descriptor.capabilities),
        })
        behavior.on_spawn(HolonContext(self, descriptor.id))
        return descriptor.id

    def descriptor(self, holon_id: str) -> HolonDescriptor:
        entry = self._holons.get(holon_id)
        if entry is None:
            raise UnknownHolon(holon_id)
        return entry.descriptor

    def behavior(self, holon_id: str) -> Behavior:
        entry = self._holons.get(holon_id)
        if entry is None:
            raise UnknownHolon(holon_id)
        return entry.behavior

    def has_holon(self, holon_id: str) -> bool:
        return holon_id in self._holons

    def holon_ids(self) -> list[str]:
        return sorted(self._holons)

    def set_status(self, holon_id: str, status: HolonStatus) -> None:
        descriptor = self.descriptor(holon_id)
        if descriptor.status is status:
            return
        descriptor.status = status
        self.log_event(EventKind.STATE_CHANGED, {
            "entity": holon_id,
            "change": "status",
            "status": status.value,
        })

    def retire(self, holon_id: str) -> None:
        self.set_status(holon_id, HolonStatus.RETIRED)

    def lookup(self, selector: Any) -> list[str]:
        """All non-Retired holons matching a role or capability tag, sorted."""
        if isinstance(selector, HolonRole):
            role, capability = selector, None
        elif isinstance(selector, str) and selector.startswith(ROLE_PREFIX):
            role, capability = _ROLE_VALUES.get(selector[len(ROLE_PREFIX):]), None
            if role is None:
                return []
        elif isinstance(selector, str) and selector in _ROLE_VALUES:
            role, capability = _ROLE_VALUES[selector], None
        else:
            role, capability = None, str(selector)
        out = []
        for hid in sorted(self._holons):
            d = self._holons[hid].descriptor
            if d.status is HolonStatus.RETIRED:
                continue
            if role is not None and d.role is role:
                out.append(hid)
            elif capability is not None and capability in d.capabilities:
                out.append(hid)
        return out

    # -- messaging ---------------------------------------------------

    def send(self, sender: str, recipient: str, kind: str,
             payload: dict[str, Any] | None = None,
             correlation_id: str | None = None) -> Envelope:
        """Build an envelope with the next per-sender msg_id and route it."""
        if sender not in self._holons:
            raise UnknownHolon(f"sender not registered: {sender}")
        envelope = Envelope(
            msg_id=self._msg_counters[sender],
            sender=sender,
            recipient=recipient,
            sent_at=self.clock.now,
            kind=kind,
            payload=payload or {},
            correlation_id=correlation_id,
        )
        self.route(envelope)
        return envelope

    def route(self, envelope: Envelope) -> int:
        """Enqueue an envelope to every matching recipient mailbox.

        Broadcast selectors ("role:<Role>") fan out to all non-Retired
        matches except the sender, in lexicographic id order. Returns the
        enqueue tick.
        """
        sender_entry = self._holons.get(envelope.sender)
        if sender_entry is None:
            raise UnknownHolon(f"sender not registered: {envelope.sender}")
        if sender_entry.descriptor.status is HolonStatus.RETIRED:
            raise SenderRetired(envelope.sender)
        if envelope.msg_id < self._msg_counters[envelope.sender]:
            raise SosimError(
                f"msg_id {envelope.msg_id} not monotone for sender {envelope.sender}")
        self._msg_counters[envelope.sender] = envelope.msg_id + 1

        if envelope.recipient.startswith(ROLE_PREFIX):
            targets = [hid for hid in self.lookup(envelope.recipient) if hid != envelope.sender]
            broadcast = True
        else:
            entry = self._holons.get(envelope.recipient)
            if entry is None or entry.descriptor.status is HolonStatus.RETIRED:
                raise UnknownRecipient(envelope.recipient)
            targets = [envelope.recipient]
            broadcast = False

        for target in targets:
            self._holons[target].staging.append((target, envelope))
            self.log_event(EventKind.MESSAGE_SENT, envelope.body(target if broadcast else None))
        return self.clock.now

    # -- time --------------------------------------------------------

    def step(self, n: int = 1) -> list[EventRecord]:
        """Advance n ticks, delivering mail and running behavior hooks.

        Per tick: staged mail becomes visible, then every non-Retired holon
        (lexicographic order) runs on_tick and drains its visible inbox.
        Mail sent during a tick is staged for the next one.
        """
        if n < 1:
            raise ValueError("step requires n >= 1")
        start_index = len(self.log)
        for _ in range(n):
            ids = sorted(self._holons)
            for hid in ids:
                entry = self._holons[hid]
                if entry.staging:
                    entry.inbox.extend(entry.staging)
                    entry.staging.clear()
            for hid in ids:
                entry = self._holons[hid]
                if entry.descriptor.status is HolonStatus.RETIRED:
                    continue
                ctx = HolonContext(self, hid)
                entry.behavior.on_tick(ctx)
                while entry.inbox:
                    target, envelope = entry.inbox.popleft()
                    self.log_event(EventKind.MESSAGE_DELIVERED, {
                        "msg_id": envelope.msg_id,
                        "sender": envelope.sender,
                        "recipient": target,
                        "kind": envelope.kind,
                        "correlation_id": envelope.correlation_id,
                    })
                    entry.behavior.on_message(ctx, envelope)
            self.clock.advance(1)
        return self.log.since(start_index)

    def pending_mail(self) -> int:
        return sum(len(e.inbox) + len(e.staging) for e in self._holons.values())

    def log_event(self, kind: EventKind, body: dict[str, Any]) -> EventRecord:
        return self.log.append(self.clock.now, kind, body)
