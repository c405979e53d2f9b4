"""Append-only event log with canonical newline-delimited JSON serialization.

Every record is serialized with sorted keys and compact separators so that
two runs of the same scenario produce byte-identical log streams. Replay
checks and all metrics are computed from these records alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Any, Iterable, Iterator

from .errors import SosimError


class MalformedLog(SosimError):
    """A log line could not be parsed into a well-formed record."""


class EventKind(Enum):
    MESSAGE_SENT = "MessageSent"
    MESSAGE_DELIVERED = "MessageDelivered"
    STATE_CHANGED = "StateChanged"
    DISTURBANCE_APPLIED = "DisturbanceApplied"
    PLAN_CREATED = "PlanCreated"
    TASK_STATUS_CHANGED = "TaskStatusChanged"
    METRIC_SAMPLE = "MetricSample"


_KIND_VALUES = {k.value for k in EventKind}


@dataclass(frozen=True)
class EventRecord:
    """One log entry. Records are totally ordered by (tick, seq)."""

    tick: int
    seq: int
    kind: EventKind
    body: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"tick": self.tick, "seq": self.seq, "kind": self.kind.value, "body": self.body}

    def to_line(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(doc: Any) -> str:
    """Deterministic JSON encoding: sorted keys, compact separators."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def parse_record(line: str) -> EventRecord:
    line = line.strip()
    if not line:
        raise MalformedLog("empty log line")
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLog(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedLog("log line is not an object")
    missing = {"tick", "seq", "kind", "body"} - doc.keys()
    if missing:
        raise MalformedLog(f"record missing fields: {sorted(missing)}")
    if doc["kind"] not in _KIND_VALUES:
        raise MalformedLog(f"unknown event kind {doc['kind']!r}")
    if not isinstance(doc["tick"], int) or not isinstance(doc["seq"], int):
        raise MalformedLog("tick and seq must be integers")
    if not isinstance(doc["body"], dict):
        raise MalformedLog("body must be an object")
    return EventRecord(tick=doc["tick"], seq=doc["seq"], kind=EventKind(doc["kind"]), body=doc["body"])


class EventLog:
    """In-memory append-only record store with a global sequence counter."""

    def __init__(self) -> None:
        self._records: list[EventRecord] = []
        self._next_seq = 0

    def append(self, tick: int, kind: EventKind, body: dict[str, Any]) -> EventRecord:
        record = EventRecord(tick=tick, seq=self._next_seq, kind=kind, body=body)
        self._next_seq += 1
        self._records.append(record)
        return record

    @property
    def records(self) -> list[EventRecord]:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def since(self, index: int) -> list[EventRecord]:
        return self._records[index:]

    def dumps(self) -> str:
        return "".join(r.to_line() + "\n" for r in self._records)

    def dump(self, fp: IO[str]) -> None:
        for r in self._records:
            fp.write(r.to_line() + "\n")


def write_log(records: Iterable[EventRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for r in records:
            fp.write(r.to_line() + "\n")


def read_log(path: str) -> list[EventRecord]:
    with open(path, "r", encoding="utf-8") as fp:
        return [parse_record(line) for line in fp if line.strip()]


def iter_records(lines: Iterable[str]) -> Iterator[EventRecord]:
    for line in lines:
        if line.strip():
            yield parse_record(line)
