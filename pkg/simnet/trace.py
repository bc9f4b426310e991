"""Execution trace: every frame, state transition, error and flow verdict."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from protocol.base import Outcome, Rejected, ResetComplete, SessionEstablished


@dataclass(frozen=True)
class TraceEvent:
    time: int
    src: str
    dst: str
    kind: str
    bits: int = 0
    payload_hex: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        row = asdict(self)
        row["payload-hex"] = row.pop("payload_hex")
        return row


def describe(outcome: Outcome | None) -> str:
    if outcome is None:
        return "open"
    if isinstance(outcome, SessionEstablished):
        return "session_established"
    if isinstance(outcome, ResetComplete):
        return "reset_complete"
    if isinstance(outcome, Rejected):
        return f"rejected:{outcome.reason}"
    return type(outcome).__name__


@dataclass
class FlowRecord:
    index: int
    label: str
    owner: str
    started_at: int
    closed_at: int | None = None
    outcome: Outcome | None = None
    closed_by: str = ""

    @property
    def verdict(self) -> str:
        return describe(self.outcome)

    @property
    def succeeded(self) -> bool:
        return isinstance(self.outcome, (SessionEstablished, ResetComplete))


@dataclass
class Trace:
    seed: int
    events: list[TraceEvent] = field(default_factory=list)
    flows: list[FlowRecord] = field(default_factory=list)
    verdicts: list[tuple[int, str, Outcome]] = field(default_factory=list)

    def record(self, event: TraceEvent) -> None:
        self.events.append(event)

    def open_flows(self, owner: str | None = None) -> list[FlowRecord]:
        return [
            flow for flow in self.flows
            if flow.closed_at is None and (owner is None or flow.owner == owner)
        ]

    def established(self) -> list[SessionEstablished]:
        return [o for _, _, o in self.verdicts if isinstance(o, SessionEstablished)]

    def messages(self, kind: str | None = None) -> list[TraceEvent]:
        """Frames handed to their receiver, optionally only those of one kind."""
        return [
            e for e in self.events
            if e.note.startswith(("deliver", "tamper", "replay", "inject")) and (kind is None or e.kind == kind)
        ]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in self.events)
