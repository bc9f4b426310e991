"""Patient IC card: holds Key1 in a POK and answers the programmer over contact."""

from __future__ import annotations

import logging

import numpy as np

from crypto import TRIVIUM_KEY_BYTES, hmac_verify
from errors import (
    AuthRejected,
    CacheExhausted,
    ImdSimError,
    InvalidParameter,
    ProtocolError,
    reject_code,
)
from fuzzycommit import LockedCode
from keygen import KeyGenerator, Lineage, Resolution
from pok import PokContainer
from .base import Action, Entity, Frame, Send
from .emergency import CacheItem
from .messages import (
    CardAuthRequest,
    CardAuthResponse,
    EmergentCardRequest,
    EmergentCardResponse,
    RejectNotice,
)
from .tokens import card_share, challenge_a_input

logger = logging.getLogger(__name__)


class PatientCard(Entity):
    def __init__(self, key1: PokContainer, cache_size: int = 4, name: str = "card") -> None:
        super().__init__()
        self._name = name
        self.key1 = key1
        self.cache_size = cache_size
        self.id_i: int | None = None
        self.gen_a: KeyGenerator | None = None
        self.emergency_cache: list[CacheItem] = []
        self.theta_lock: LockedCode | None = None

    @classmethod
    def blank(cls, rng: np.random.Generator, cache_size: int = 4, name: str = "card") -> PatientCard:
        """A factory-fresh card with a random Key1 and an intact OTP port."""
        secret = rng.bytes(TRIVIUM_KEY_BYTES)
        return cls(PokContainer(secret, label=f"{name}.key1"), cache_size, name)

    @property
    def name(self) -> str:
        return self._name

    @property
    def cycle(self) -> int:
        return self._generator().cycle

    def __repr__(self) -> str:
        cycle = self.gen_a.cycle if self.gen_a else None
        cached = [item.i for item in self.emergency_cache]
        return f"PatientCard(id_i={self.id_i}, cycle={cycle}, cache={cached})"

    def enroll(self, id_i: int, iv: bytes) -> None:
        self.id_i = id_i
        self.gen_a = KeyGenerator(self.key1, iv, Lineage.SA)
        self.emergency_cache = []

    def _generator(self) -> KeyGenerator:
        if self.gen_a is None:
            raise ProtocolError("patient card is not enrolled")
        return self.gen_a

    # ── Normal access (steps iii-iv) ──────────────────────────────────────

    def _check_challenge(self, msg: CardAuthRequest) -> Resolution:
        gen = self._generator()
        self.key1.internal_read()
        res = gen.resolve_for_counter(msg.i)
        if not hmac_verify(msg.hmac_a, res.key.key, challenge_a_input(msg.t1)):
            raise AuthRejected(f"HMAC_SA on T1 does not verify for cycle {msg.i}")
        return res

    def _after_share(self, res: Resolution) -> None:
        # Served from the one-step cache means the card is already ahead.
        if res.recovered:
            self.emit("state", f"served cycle {res.key.cycle} from one-step cache")
            return
        self.gen_a.advance()
        self._prune_cache()
        self.emit("state", f"advanced to cycle {self.gen_a.cycle}")

    def authorize(self, msg: CardAuthRequest) -> CardAuthResponse:
        res = self._check_challenge(msg)
        response = CardAuthResponse(card_share(res.key.key, msg.t1, msg.r))
        self._after_share(res)
        return response

    # ── Emergent access ───────────────────────────────────────────────────

    def cache_item(self, i: int) -> CacheItem:
        for item in self.emergency_cache:
            if item.i == i:
                return item
        raise CacheExhausted(f"no cached SB for cycle {i}")

    def emergent_authorize(self, msg: EmergentCardRequest) -> EmergentCardResponse:
        item = self.cache_item(msg.i)
        res = self._check_challenge(msg)
        response = EmergentCardResponse(card_share(res.key.key, msg.t1, msg.r), item.i, item.ct)
        self._after_share(res)
        return response

    def store_cache(self, items: list[CacheItem]) -> None:
        if len(items) > self.cache_size:
            raise InvalidParameter(f"card holds at most {self.cache_size} cached keys")
        cycles = [item.i for item in items]
        if any(b <= a for a, b in zip(cycles, cycles[1:])):
            raise InvalidParameter("cache items must be strictly increasing in cycle")
        self.emergency_cache = list(items)
        logger.debug("card %s cache refilled for cycles %s", self.id_i, cycles)

    def _prune_cache(self) -> None:
        floor = self.gen_a.cycle - 1
        self.emergency_cache = [item for item in self.emergency_cache if item.i >= floor]

    # ── Contact interface ─────────────────────────────────────────────────

    def on_frame(self, frame: Frame, now: int) -> list[Action]:
        try:
            if frame.kind == EmergentCardRequest.KIND:
                reply = self.emergent_authorize(EmergentCardRequest.decode(frame.payload))
            elif frame.kind == CardAuthRequest.KIND:
                reply = self.authorize(CardAuthRequest.decode(frame.payload))
            else:
                raise ProtocolError(f"card cannot handle {frame.kind}")
        except ImdSimError as exc:
            logger.info("card %s refused %s: %s", self.id_i, frame.kind, exc)
            self.emit("error", f"{exc.code}: {exc}")
            return [Send(frame.src, RejectNotice(reject_code(exc)))]
        return [Send(frame.src, reply)]
