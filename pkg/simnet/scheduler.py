"""Single-queue discrete-event scheduler.

Events are ordered by (time, sequence number), so events at the same
millisecond run in the order they were scheduled.  The run is a pure
function of the entities' initial state, the flow starts and the adversary
script; nothing reads the wall clock.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from errors import ProtocolError, ScenarioStalled, ScriptError
from protocol.base import Action, Entity, Frame, Send, Timer
from .adversary import Adversary, Inject, Replay, StealCard, TamperCard, TimedAction
from .channel import Channel
from .clock import SimClock
from .trace import FlowRecord, Trace, TraceEvent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowStart:
    """Calls *start* on behalf of *owner* at time *at*; the returned actions are sent."""

    at: int
    owner: str
    start: Callable[[], list[Action]]
    label: str


@dataclass(frozen=True)
class _Deliver:
    frame: Frame
    note: str


@dataclass(frozen=True)
class _Fire:
    entity: str
    tag: str


class Simulator:
    def __init__(
        self,
        entities: Iterable[Entity],
        channels: Iterable[Channel],
        seed: int = 0,
        adversary: Adversary | None = None,
    ) -> None:
        self.entities: dict[str, Entity] = {e.name: e for e in entities}
        self.channels = list(channels)
        self.clock = SimClock()
        self.trace = Trace(seed)
        self.adversary = adversary
        self._queue: list[tuple[int, int, object]] = []
        self._seq = itertools.count()
        if adversary is not None:
            for action in adversary.timed_actions():
                self._push(action.at, action)

    def __repr__(self) -> str:
        return f"Simulator(now={self.clock.now}, pending={len(self._queue)})"

    # ── Queue ─────────────────────────────────────────────────────────────

    def _push(self, at: int, event: object) -> None:
        heapq.heappush(self._queue, (at, next(self._seq), event))

    def schedule(self, flow: FlowStart) -> None:
        self._push(flow.at, flow)

    def channel_for(self, src: str, dst: str) -> Channel:
        for channel in self.channels:
            if channel.connects(src, dst):
                return channel
        raise ProtocolError(f"no channel between {src} and {dst}")

    def _entity(self, name: str) -> Entity:
        entity = self.entities.get(name)
        if entity is None:
            raise ProtocolError(f"no entity named {name!r}")
        return entity

    # ── Tracing ───────────────────────────────────────────────────────────

    def _frame_event(self, frame: Frame, note: str) -> None:
        self.trace.record(
            TraceEvent(self.clock.now, frame.src, frame.dst, frame.kind, frame.bits, frame.payload.hex(), note)
        )

    def _collect(self, entity: Entity) -> None:
        for event in entity.drain_events():
            self.trace.record(TraceEvent(self.clock.now, entity.name, "", event.kind, note=event.note))
            if event.kind != "verdict":
                continue
            self.trace.verdicts.append((self.clock.now, entity.name, event.outcome))
            owner = event.peer or entity.name
            open_flows = self.trace.open_flows(owner)
            if not open_flows:
                logger.debug("verdict from %s with no open flow of %s: %s", entity.name, owner, event.note)
                continue
            flow = open_flows[0]
            flow.closed_at = self.clock.now
            flow.outcome = event.outcome
            flow.closed_by = entity.name

    # ── Actions ───────────────────────────────────────────────────────────

    def _act(self, src: str, actions: list[Action]) -> None:
        for action in actions:
            if isinstance(action, Send):
                self._send(src, action)
            elif isinstance(action, Timer):
                self._push(self.clock.now + action.delay_ms, _Fire(src, action.tag))

    def _send(self, src: str, action: Send) -> None:
        msg = action.message
        frame = Frame(src, action.dst, msg.KIND, msg.encode())
        if action.dst.startswith("adversary") and action.dst not in self.entities:
            self._frame_event(frame, "to adversary")
            return
        channel = self.channel_for(src, action.dst)
        channel.sent_bits += frame.bits
        self._frame_event(frame, "send")
        note = "deliver"
        if channel.adversary is not None:
            _, frame, note = channel.adversary.intercept(frame)
            if frame is None:
                channel.dropped += 1
                self.trace.record(TraceEvent(self.clock.now, src, action.dst, msg.KIND, note=note))
                return
            if note.startswith("tamper"):
                channel.tampered += 1
        self._push(self.clock.now + channel.latency_ms, _Deliver(frame, note))

    def _deliver(self, event: _Deliver) -> None:
        frame = event.frame
        dst = self._entity(frame.dst)
        if not frame.src.startswith("adversary"):
            self.channel_for(frame.src, frame.dst).delivered_bits += frame.bits
        self._frame_event(frame, event.note)
        self._act(dst.name, dst.on_frame(frame, self.clock.now))
        self._collect(dst)

    def _adversary_action(self, action: TimedAction) -> None:
        adversary = self.adversary
        if isinstance(action, Replay):
            original = adversary.recorded(action.index)
            dst = action.dst or original.dst
            frame = Frame(original.src, dst, original.kind, original.payload)
            channel = self.channel_for(frame.src, dst)
            channel.sent_bits += frame.bits
            self._push(self.clock.now + channel.latency_ms, _Deliver(frame, f"replay #{action.index}"))
        elif isinstance(action, Inject):
            frame = Frame(action.src, action.dst, action.kind, bytes(action.raw))
            self._push(self.clock.now, _Deliver(frame, "inject"))
        elif isinstance(action, StealCard):
            programmer = self._entity(action.programmer)
            card = getattr(programmer, "patient_card", None)
            programmer.insert_patient_card(None)
            note = f"card {card.name if card else '-'} stolen"
            self.trace.record(TraceEvent(self.clock.now, "adversary", action.programmer, "steal_card", note=note))
        elif isinstance(action, TamperCard):
            card = self._entity(action.card)
            card.key1.tamper()
            self.trace.record(TraceEvent(self.clock.now, "adversary", action.card, "tamper_card", note="POK destroyed"))

    # ── Main loop ─────────────────────────────────────────────────────────

    def _start_flow(self, flow: FlowStart) -> None:
        owner = self._entity(flow.owner)
        record = FlowRecord(len(self.trace.flows), flow.label, flow.owner, self.clock.now)
        self.trace.flows.append(record)
        self.trace.record(TraceEvent(self.clock.now, flow.owner, "", "flow", note=f"start {flow.label}"))
        self._act(owner.name, flow.start())
        self._collect(owner)

    def step(self) -> None:
        at, _, event = heapq.heappop(self._queue)
        self.clock.advance_to(at)
        if isinstance(event, FlowStart):
            self._start_flow(event)
        elif isinstance(event, _Deliver):
            self._deliver(event)
        elif isinstance(event, _Fire):
            entity = self._entity(event.entity)
            self._act(entity.name, entity.on_timer(event.tag, self.clock.now))
            self._collect(entity)
        else:
            self._adversary_action(event)

    def run(self, until: int | None = None) -> Trace:
        while self._queue:
            if until is not None and self._queue[0][0] > until:
                return self.trace
            try:
                self.step()
            except ScriptError:
                logger.warning("adversary script error at t=%d", self.clock.now)
                raise
        stalled = self.trace.open_flows()
        if stalled:
            labels = ", ".join(f.label for f in stalled)
            exc = ScenarioStalled(f"no events left and no verdict for: {labels}")
            exc.trace = self.trace
            raise exc
        return self.trace


def run_scenario(
    entities: Iterable[Entity],
    channels: Iterable[Channel],
    flows: Iterable[FlowStart],
    script: Iterable | None = None,
    seed: int = 0,
    until: int | None = None,
    hooked: tuple[str, ...] = ("wireless",),
) -> Trace:
    """Run *flows* to completion.  The adversary, if scripted, sits on the *hooked* channel kinds."""
    adversary = Adversary(list(script)) if script is not None else None
    channels = list(channels)
    if adversary is not None:
        for channel in channels:
            if channel.label in hooked:
                channel.install(adversary)
    sim = Simulator(entities, channels, seed, adversary)
    for flow in flows:
        sim.schedule(flow)
    return sim.run(until)
