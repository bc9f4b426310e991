"""Temporary key pair generator.

Cycle ``i`` owns keystream bits ``[256*(i-1), 256*i)`` of Trivium(master, IV);
the temporary key for the cycle is the SHA-256 of that slice.  Keys are
re-derived from the start of the stream on demand so any party can answer
for any cycle without keeping generator state around.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from crypto import KeySource, keystream_bytes, sha256, trivium_init
from errors import DesyncError, InvalidCycle, KeyDestroyed

logger = logging.getLogger(__name__)

KEY_SLICE_BITS = 256
MAX_CYCLE = 0xFFFFFFFF
# Derived keys a generator remembers; each costs a walk over the keystream.
DERIVED_CACHE_SIZE = 64


class Lineage(enum.Enum):
    SA = "SA"  # from Key1, patient card side
    SB = "SB"  # from Key2, HAS side


@dataclass(frozen=True)
class TempKey:
    key: bytes
    cycle: int
    lineage: Lineage


@dataclass(frozen=True)
class Resolution:
    key: TempKey
    recovered: bool  # served from the one-step cache


def _derive(master: bytes, iv: bytes, cycle: int) -> bytes:
    state = trivium_init(master, iv)
    state.skip(KEY_SLICE_BITS * (cycle - 1))
    return sha256(keystream_bytes(state.keystream(KEY_SLICE_BITS)))


class KeyGenerator:
    """Per-entity generator for one lineage, with an optional one-step cache."""

    def __init__(
        self,
        master: KeySource,
        iv: bytes,
        lineage: Lineage,
        cycle: int = 1,
        cache_enabled: bool = True,
    ) -> None:
        if not 1 <= cycle <= MAX_CYCLE:
            raise InvalidCycle(f"cycle must be in 1..{MAX_CYCLE}, got {cycle}")
        self.master = master
        self.iv = bytes(iv)
        self.lineage = lineage
        self.cycle = cycle
        self.cache_enabled = cache_enabled
        self.cache_prev: TempKey | None = None
        self._derived: dict[int, bytes] = {}

    def __repr__(self) -> str:
        cached = self.cache_prev.cycle if self.cache_prev else None
        return f"KeyGenerator({self.lineage.value}, cycle={self.cycle}, cached={cached})"

    def _read_master(self) -> bytes:
        try:
            return self.master.internal_read()
        except KeyDestroyed:
            # Nothing derived from a destroyed master may outlive it.
            self._derived.clear()
            self.cache_prev = None
            raise

    def derive_key(self, i: int) -> TempKey:
        if not 1 <= i <= MAX_CYCLE:
            raise InvalidCycle(f"cycle must be in 1..{MAX_CYCLE}, got {i}")
        master = self._read_master()
        key = self._derived.get(i)
        if key is None:
            key = _derive(master, self.iv, i)
            if len(self._derived) >= DERIVED_CACHE_SIZE:
                del self._derived[next(iter(self._derived))]
            self._derived[i] = key
        return TempKey(key, i, self.lineage)

    def current_key(self) -> TempKey:
        return self.derive_key(self.cycle)

    def advance(self) -> None:
        if self.cycle >= MAX_CYCLE:
            raise InvalidCycle("cycle counter exhausted")
        if self.cache_enabled:
            self.cache_prev = self.derive_key(self.cycle)
        self.cycle += 1
        logger.debug("%s generator advanced to cycle %d", self.lineage.value, self.cycle)

    def resolve_for_counter(self, received_i: int) -> Resolution:
        if received_i == self.cycle:
            return Resolution(self.derive_key(received_i), recovered=False)
        cached = self.cache_prev
        if cached is not None and received_i == self.cycle - 1 and cached.cycle == received_i:
            # Re-check the master so a tampered container still refuses.
            self._read_master()
            logger.info(
                "%s counter %d is one behind local %d, serving cached key",
                self.lineage.value, received_i, self.cycle,
            )
            return Resolution(cached, recovered=True)
        raise DesyncError(
            f"{self.lineage.value} counter {received_i} outside recovery window of local {self.cycle}"
        )

    def accepted_counters(self) -> set[int]:
        accepted = {self.cycle}
        if self.cache_prev is not None:
            accepted.add(self.cache_prev.cycle)
        return accepted


def derive_key(gen: KeyGenerator, i: int) -> TempKey:
    return gen.derive_key(i)


def advance(gen: KeyGenerator) -> None:
    gen.advance()


def resolve_for_counter(gen: KeyGenerator, received_i: int) -> Resolution:
    return gen.resolve_for_counter(received_i)
