"""Simulated Physically Obfuscated Key storage.

A ``PokContainer`` stands in for the POK module packed on an IC card: the
secret can be handed to the on-chip cipher any number of times, extracted
through the one-time-programming port exactly once, and is wiped for good
the moment the package is tampered with.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from errors import InvalidSecret, KeyDestroyed, OtpFused

logger = logging.getLogger(__name__)


class OtpState(enum.Enum):
    INTACT = "intact"
    FUSED = "fused"


class TamperState(enum.Enum):
    SOUND = "sound"
    DESTROYED = "destroyed"


class PokContainer:
    """Sealed key storage with an OTP extraction port and destructive tamper semantics."""

    def __init__(self, secret: bytes, label: str = "") -> None:
        if not secret:
            raise InvalidSecret("POK secret must be non-empty")
        self._secret = bytearray(secret)
        self.label = label
        self.otp_state = OtpState.INTACT
        self.tamper_state = TamperState.SOUND

    def __repr__(self) -> str:
        return (
            f"PokContainer(label={self.label!r}, otp={self.otp_state.value}, "
            f"tamper={self.tamper_state.value})"
        )

    @property
    def sound(self) -> bool:
        return self.tamper_state is TamperState.SOUND

    def _check_sound(self) -> None:
        if self.tamper_state is TamperState.DESTROYED:
            raise KeyDestroyed(f"POK {self.label or '<unnamed>'} was tampered with")

    def otp_extract(self) -> bytes:
        self._check_sound()
        if self.otp_state is OtpState.FUSED:
            raise OtpFused(f"OTP port of {self.label or '<unnamed>'} is already fused")
        self.otp_state = OtpState.FUSED
        logger.debug("OTP extraction on %s, port fused", self.label)
        return bytes(self._secret)

    def internal_read(self) -> bytes:
        """Cipher-path read; unaffected by the OTP fuse."""
        self._check_sound()
        return bytes(self._secret)

    def tamper(self) -> None:
        if self.tamper_state is TamperState.DESTROYED:
            return
        for idx in range(len(self._secret)):
            self._secret[idx] = 0
        self.tamper_state = TamperState.DESTROYED
        logger.info("POK %s tampered, secret zeroized", self.label)


@dataclass
class ServerKey:
    """Server-side key record (the HAS keeps its master keys in managed storage)."""

    secret: bytes

    def __post_init__(self) -> None:
        if not self.secret:
            raise InvalidSecret("server key must be non-empty")

    def internal_read(self) -> bytes:
        return self.secret


def pok_provision(secret: bytes, label: str = "") -> PokContainer:
    return PokContainer(secret, label)


def otp_extract(container: PokContainer) -> bytes:
    return container.otp_extract()


def internal_read(container: PokContainer) -> bytes:
    return container.internal_read()


def tamper(container: PokContainer) -> None:
    container.tamper()
