"""Point-to-point links between two named entities."""

from __future__ import annotations

from dataclasses import dataclass, field

WIRELESS_LATENCY_MS = 1
SERVER_LATENCY_MS = 10
CONTACT_LATENCY_MS = 0


@dataclass
class Channel:
    a: str
    b: str
    latency_ms: int = WIRELESS_LATENCY_MS
    label: str = "wireless"
    sent_bits: int = 0
    delivered_bits: int = 0
    dropped: int = 0
    tampered: int = 0
    adversary: object | None = field(default=None, repr=False)

    def connects(self, src: str, dst: str) -> bool:
        return {src, dst} == {self.a, self.b}

    def install(self, adversary) -> None:
        self.adversary = adversary


def wireless(a: str, b: str, latency_ms: int = WIRELESS_LATENCY_MS) -> Channel:
    return Channel(a, b, latency_ms, "wireless")


def server_pipe(a: str, b: str, latency_ms: int = SERVER_LATENCY_MS) -> Channel:
    return Channel(a, b, latency_ms, "pipe")


def contact(a: str, b: str) -> Channel:
    return Channel(a, b, CONTACT_LATENCY_MS, "contact")
