"""Whole-flow helpers that run the entities against each other without a network.

``LocalRouter`` hands every frame straight to its destination at a fixed
time, in send order, and never fires timers.  The simulator in ``simnet``
is the place for latencies, adversaries and traces; these helpers are for
direct calls and unit tests.
"""

from __future__ import annotations

import logging
from collections import deque

from errors import CacheExhausted, ProtocolError
from fuzzycommit import IrisCode
from .base import Action, Entity, EntityEvent, Frame, Outcome, Send
from .has import Has
from .imd import Imd
from .messages import R_READ
from .patient_card import PatientCard
from .programmer import Programmer

logger = logging.getLogger(__name__)


class LocalRouter:
    def __init__(self, *entities: Entity, now: int = 0) -> None:
        self.entities = {entity.name: entity for entity in entities}
        self.now = now
        self.frames: list[Frame] = []
        self.events: list[tuple[str, EntityEvent]] = []
        self._queue: deque[Frame] = deque()

    def post(self, src: str, actions: list[Action]) -> None:
        for action in actions:
            if isinstance(action, Send):
                msg = action.message
                self._queue.append(Frame(src, action.dst, msg.KIND, msg.encode()))

    def _collect(self) -> None:
        for name, entity in self.entities.items():
            self.events.extend((name, event) for event in entity.drain_events())

    def run(self) -> Outcome | None:
        """Deliver until quiet; return the first verdict reached, if any."""
        self._collect()
        while self._queue:
            frame = self._queue.popleft()
            dst = self.entities.get(frame.dst)
            if dst is None:
                raise ProtocolError(f"no entity named {frame.dst!r}")
            self.frames.append(frame)
            self.post(dst.name, dst.on_frame(frame, self.now))
            self._collect()
        return self.outcome()

    def outcome(self) -> Outcome | None:
        for _, event in self.events:
            if event.kind == "verdict":
                return event.outcome
        return None


def normal_access(
    programmer: Programmer,
    imd: Imd,
    has: Has,
    card: PatientCard,
    r: int = R_READ,
    now: int = 0,
) -> Outcome | None:
    programmer.insert_patient_card(card)
    router = LocalRouter(programmer, imd, has, card, now=now)
    router.post(programmer.name, programmer.start_normal(r))
    return router.run()


def emergent_access(
    programmer: Programmer,
    card: PatientCard,
    theta_sam: IrisCode,
    imd: Imd,
    r: int = R_READ,
    now: int = 0,
) -> Outcome | None:
    """Offline access from the card's emergency cache; raises CacheExhausted when it is empty."""
    programmer.insert_patient_card(card)
    router = LocalRouter(programmer, imd, card, now=now)
    router.post(programmer.name, programmer.start_emergent(theta_sam, r))
    outcome = router.run()
    if outcome is not None and getattr(outcome, "reason", None) == CacheExhausted.code:
        raise CacheExhausted(f"patient card holds no cached SB for cycle {imd.cycle}")
    return outcome


def refill_cache(has: Has, card: PatientCard, count: int) -> PatientCard:
    """Write encrypted SB keys for the card's next *count* cycles (trusted clinic call)."""
    start = card.cycle
    items = has.cache_items(card.id_i, start, count)
    # Offline accesses moved the card and IMD on without the HAS.
    has.resync(card.id_i, start)
    card.store_cache(items)
    return card


def recovery_reset(imd: Imd, programmer: Programmer, has: Has, now: int = 0) -> Outcome | None:
    router = LocalRouter(programmer, imd, has, now=now)
    router.post(programmer.name, programmer.start_recovery(imd.id_i))
    return router.run()
