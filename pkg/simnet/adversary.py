"""Scripted Dolev-Yao style adversary sitting on one or more channels.

Every frame that crosses a hooked channel is observed and numbered in
order, starting from 0.  Drop and Tamper act on a numbered frame as it goes
by; Replay re-sends a frame seen earlier; Inject delivers arbitrary bytes.
StealCard and TamperCard act on the physical world at a given time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from errors import ScriptError
from protocol.base import Frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Eavesdrop:
    pass


@dataclass(frozen=True)
class Drop:
    index: int


@dataclass(frozen=True)
class Tamper:
    index: int
    bit_positions: tuple[int, ...]


@dataclass(frozen=True)
class Replay:
    index: int
    at: int
    dst: str | None = None  # default: the original receiver


@dataclass(frozen=True)
class Inject:
    raw: bytes
    at: int
    dst: str = "imd"
    src: str = "adversary"
    kind: str = "Injected"


@dataclass(frozen=True)
class StealCard:
    at: int
    programmer: str = "programmer"


@dataclass(frozen=True)
class TamperCard:
    at: int
    card: str = "card"


AdversaryAction = Eavesdrop | Drop | Tamper | Replay | Inject | StealCard | TamperCard
TimedAction = Replay | Inject | StealCard | TamperCard


def flip_bits(payload: bytes, positions: tuple[int, ...]) -> bytes:
    """Flip bits counted MSB-first from the start of *payload*."""
    data = bytearray(payload)
    for pos in positions:
        if not 0 <= pos < len(data) * 8:
            raise ScriptError(f"bit {pos} is outside a {len(data) * 8}-bit frame")
        data[pos // 8] ^= 0x80 >> (pos % 8)
    return bytes(data)


@dataclass
class Adversary:
    script: list[AdversaryAction] = field(default_factory=list)
    observed: list[Frame] = field(default_factory=list)

    def add(self, action: AdversaryAction) -> Adversary:
        self.script.append(action)
        return self

    def timed_actions(self) -> list[TimedAction]:
        return [a for a in self.script if isinstance(a, (Replay, Inject, StealCard, TamperCard))]

    def intercept(self, frame: Frame) -> tuple[int, Frame | None, str]:
        """Observe *frame*; return its index, what to deliver (None when dropped) and a note."""
        index = len(self.observed)
        self.observed.append(frame)
        for action in self.script:
            if isinstance(action, Drop) and action.index == index:
                logger.debug("adversary drops #%d %s", index, frame.kind)
                return index, None, f"drop #{index}"
        for action in self.script:
            if isinstance(action, Tamper) and action.index == index:
                payload = flip_bits(frame.payload, action.bit_positions)
                bits = ",".join(str(p) for p in action.bit_positions)
                return index, Frame(frame.src, frame.dst, frame.kind, payload), f"tamper #{index} bits={bits}"
        return index, frame, f"deliver #{index}"

    def recorded(self, index: int) -> Frame:
        if not 0 <= index < len(self.observed):
            raise ScriptError(
                f"replay of frame #{index}, but only {len(self.observed)} frames were observed so far"
            )
        return self.observed[index]


def adversary_drop(adversary: Adversary, index: int) -> Adversary:
    return adversary.add(Drop(index))


def adversary_tamper(adversary: Adversary, index: int, bit_positions: tuple[int, ...]) -> Adversary:
    return adversary.add(Tamper(index, tuple(bit_positions)))


def adversary_replay(adversary: Adversary, index: int, at: int, dst: str | None = None) -> Adversary:
    return adversary.add(Replay(index, at, dst))
