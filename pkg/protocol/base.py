"""Abstract base class for protocol entities and the values they exchange."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .messages import Message

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Frame:
    """One serialized message in flight between two named entities."""

    src: str
    dst: str
    kind: str
    payload: bytes

    @property
    def bits(self) -> int:
        return len(self.payload) * 8


@dataclass(frozen=True)
class Send:
    dst: str
    message: Message


@dataclass(frozen=True)
class Timer:
    delay_ms: int
    tag: str


Action = Send | Timer


@dataclass(frozen=True)
class EntityEvent:
    kind: str  # "state", "error" or "verdict"
    note: str
    outcome: Outcome | None = None
    peer: str = ""  # programmer whose flow a verdict settles


# ── Flow outcomes ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SessionEstablished:
    skey: bytes
    cycle: int
    request_code: int
    id_p: int


@dataclass(frozen=True)
class Rejected:
    reason: str


@dataclass(frozen=True)
class ResetComplete:
    challenges: int


Outcome = SessionEstablished | Rejected | ResetComplete


class Entity(ABC):
    """A protocol party driven by delivered frames.

    Each entity knows how to:
    - Decode the frames addressed to it and act on them
    - Answer with frames for other entities, or ask for a timer
    - Report its state transitions and verdicts as events
    """

    def __init__(self) -> None:
        self._events: list[EntityEvent] = []

    @property
    @abstractmethod
    def name(self) -> str:
        """Address of the entity on the simulated network, e.g. 'imd'."""

    @abstractmethod
    def on_frame(self, frame: Frame, now: int) -> list[Action]:
        """Handle one delivered frame at time *now* (ms) and return follow-up actions."""

    def on_timer(self, tag: str, now: int) -> list[Action]:
        """Handle a timer requested earlier.  Entities without timers ignore it."""
        return []

    def emit(self, kind: str, note: str, outcome: Outcome | None = None, peer: str = "") -> None:
        self._events.append(EntityEvent(kind, note, outcome, peer))
        logger.debug("%s %s: %s", self.name, kind, note)

    def drain_events(self) -> list[EntityEvent]:
        events, self._events = self._events, []
        return events
