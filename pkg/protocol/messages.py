"""Wire messages: fixed-width, big-endian fields packed in declaration order."""

from __future__ import annotations

import struct
from dataclasses import astuple, dataclass
from typing import ClassVar

from errors import ProtocolError

# Request codes
R_READ = 0x00000001
R_REPROGRAM = 0x00000002
R_RESET = 0xFFFFFFFF

# Identity bound into the HAS share during offline emergent access.
FIRST_AIDER = 0xFFFFFFFE

NO_UMAC = bytes(32)


@dataclass(frozen=True)
class Message:
    KIND: ClassVar[str] = ""
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">")

    @classmethod
    def width_bits(cls) -> int:
        return cls.LAYOUT.size * 8

    @property
    def bits(self) -> int:
        return self.width_bits()

    def encode(self) -> bytes:
        return self.LAYOUT.pack(*astuple(self))

    @classmethod
    def decode(cls, raw: bytes) -> Message:
        if len(raw) != cls.LAYOUT.size:
            raise ProtocolError(
                f"{cls.KIND} needs {cls.LAYOUT.size} bytes, got {len(raw)}"
            )
        return cls(*cls.LAYOUT.unpack(raw))


# ── Programmer <-> IMD (wireless) ─────────────────────────────────────────


@dataclass(frozen=True)
class ServiceRequest(Message):
    KIND: ClassVar[str] = "ServiceRequest"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">II")
    r: int
    id_p: int


@dataclass(frozen=True)
class ImdChallenge(Message):
    KIND: ClassVar[str] = "ImdChallenge"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">III32s32s")
    id_i: int
    i: int
    t1: int
    hmac_a: bytes
    hmac_b: bytes


@dataclass(frozen=True)
class TokenSubmit(Message):
    KIND: ClassVar[str] = "TokenSubmit"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">32s")
    proof: bytes


@dataclass(frozen=True)
class ResetChallenge(Message):
    KIND: ClassVar[str] = "ResetChallenge"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">I")
    k: int


@dataclass(frozen=True)
class ResetResponse(Message):
    KIND: ClassVar[str] = "ResetResponse"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">32s")
    sb_k: bytes


# ── Programmer <-> patient card (contact) ─────────────────────────────────


@dataclass(frozen=True)
class CardAuthRequest(Message):
    KIND: ClassVar[str] = "CardAuthRequest"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">II32sI")
    i: int
    t1: int
    hmac_a: bytes
    r: int


@dataclass(frozen=True)
class EmergentCardRequest(CardAuthRequest):
    KIND: ClassVar[str] = "EmergentCardRequest"


@dataclass(frozen=True)
class CardAuthResponse(Message):
    KIND: ClassVar[str] = "CardAuthResponse"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">32s")
    hmac: bytes


@dataclass(frozen=True)
class EmergentCardResponse(Message):
    KIND: ClassVar[str] = "EmergentCardResponse"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">32sI32s")
    hmac_a_resp: bytes
    cache_i: int
    cache_ct: bytes


# ── Programmer <-> HAS (authenticated pipe) ───────────────────────────────


@dataclass(frozen=True)
class HasAuthRequest(Message):
    KIND: ClassVar[str] = "HasAuthRequest"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">IIIII32s32s")
    i: int
    t1: int
    id_i: int
    id_p: int
    r: int
    hmac_b: bytes
    umac: bytes = NO_UMAC

    def signed_part(self) -> bytes:
        """Everything the doctor's UMAC covers (the whole request minus the tag)."""
        return self.encode()[:-32]


@dataclass(frozen=True)
class HasAuthResponse(Message):
    KIND: ClassVar[str] = "HasAuthResponse"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">32s")
    hmac: bytes


@dataclass(frozen=True)
class HasResetRequest(Message):
    KIND: ClassVar[str] = "HasResetRequest"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">III32s")
    k: int
    id_i: int
    id_p: int
    umac: bytes = NO_UMAC

    def signed_part(self) -> bytes:
        return self.encode()[:-32]


@dataclass(frozen=True)
class HasResetResponse(Message):
    KIND: ClassVar[str] = "HasResetResponse"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">32s")
    sb_k: bytes


@dataclass(frozen=True)
class RejectNotice(Message):
    KIND: ClassVar[str] = "RejectNotice"
    LAYOUT: ClassVar[struct.Struct] = struct.Struct(">I")
    code: int


MESSAGE_TYPES: dict[str, type[Message]] = {
    cls.KIND: cls
    for cls in (
        ServiceRequest,
        ImdChallenge,
        TokenSubmit,
        ResetChallenge,
        ResetResponse,
        CardAuthRequest,
        EmergentCardRequest,
        CardAuthResponse,
        EmergentCardResponse,
        HasAuthRequest,
        HasAuthResponse,
        HasResetRequest,
        HasResetResponse,
        RejectNotice,
    )
}


def decode_frame(kind: str, payload: bytes) -> Message:
    cls = MESSAGE_TYPES.get(kind)
    if cls is None:
        raise ProtocolError(f"unknown message kind {kind!r}")
    return cls.decode(payload)
