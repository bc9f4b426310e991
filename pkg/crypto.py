"""Deterministic cryptographic primitives: Trivium, SHA-256, HMAC-SHA-256 and the Key3 MAC.

Trivium follows the eSTREAM reference conventions: key and IV bytes are
loaded least-significant bit first from the last byte backwards, and the
keystream is packed least-significant bit first when rendered as bytes.
The register update is evaluated 64 clocks at a time; every feedback tap
sits at least 65 cells from the input end, so 64 consecutive clocks only
ever read cells that were present before the batch started.
"""

from __future__ import annotations

import logging
from typing import Protocol

import numpy as np
from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import constant_time, hashes
from cryptography.hazmat.primitives import hmac as crypto_hmac

from errors import InvalidKey, InvalidKeyLength

logger = logging.getLogger(__name__)

Digest256 = bytes  # always 32 bytes

TRIVIUM_KEY_BYTES = 10
TRIVIUM_IV_BYTES = 10
WARMUP_CLOCKS = 4 * 288
KEY3_BYTES = 16
HMAC_MAX_KEY_BYTES = 64

_MASK64 = (1 << 64) - 1
_MASK_A = (1 << 93) - 1
_MASK_B = (1 << 84) - 1
_MASK_C = (1 << 111) - 1

# x^128 + x^7 + x^2 + x + 1
_GF128_REDUCE = (1 << 128) | 0x87


class KeySource(Protocol):
    """Anything that can hand key material to an in-container cipher."""

    def internal_read(self) -> bytes: ...


def _reverse80(value: int) -> int:
    return int(f"{value:080b}"[::-1], 2)


def _bits_from_int(value: int, n_bits: int) -> np.ndarray:
    """MSB-first bit vector of the low *n_bits* of *value*."""
    if n_bits == 0:
        return np.zeros(0, dtype=np.uint8)
    n_bytes = (n_bits + 7) // 8
    raw = np.frombuffer(value.to_bytes(n_bytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[-n_bits:]


class TriviumState:
    """Trivium generator state.  Single owner; ``position`` counts emitted bits."""

    def __init__(self, key: bytes, iv: bytes) -> None:
        if len(key) != TRIVIUM_KEY_BYTES or len(iv) != TRIVIUM_IV_BYTES:
            raise InvalidKeyLength(
                f"Trivium needs 80-bit key and IV, got {len(key) * 8} and {len(iv) * 8} bits"
            )
        self.key = bytes(key)
        self.iv = bytes(iv)
        self.position = 0
        # Register A holds s1..s93, B holds s94..s177, C holds s178..s288;
        # bit k of each int is the (k+1)-th cell of its register.
        self._a = _reverse80(int.from_bytes(self.key, "little"))
        self._b = _reverse80(int.from_bytes(self.iv, "little"))
        self._c = 0b111 << 108
        self._buf = 0
        self._buf_len = 0
        for _ in range(WARMUP_CLOCKS // 64):
            self._clock64()

    @property
    def internal(self) -> int:
        """The 288-bit register contents, s1 in the least significant bit."""
        return self._a | (self._b << 93) | (self._c << 177)

    def _clock64(self) -> int:
        a, b, c = self._a, self._b, self._c

        def w(reg: int, cell: int) -> int:
            return (reg >> (cell - 63)) & _MASK64

        t1 = w(a, 65) ^ w(a, 92)
        t2 = w(b, 68) ^ w(b, 83)
        t3 = w(c, 65) ^ w(c, 110)
        z = t1 ^ t2 ^ t3
        t1 ^= (w(a, 90) & w(a, 91)) ^ w(b, 77)
        t2 ^= (w(b, 81) & w(b, 82)) ^ w(c, 86)
        t3 ^= (w(c, 108) & w(c, 109)) ^ w(a, 68)
        self._a = ((a << 64) | t3) & _MASK_A
        self._b = ((b << 64) | t1) & _MASK_B
        self._c = ((c << 64) | t2) & _MASK_C
        return z

    def _take(self, n_bits: int) -> int:
        while self._buf_len < n_bits:
            self._buf = (self._buf << 64) | self._clock64()
            self._buf_len += 64
        rest = self._buf_len - n_bits
        out = self._buf >> rest
        self._buf &= (1 << rest) - 1
        self._buf_len = rest
        self.position += n_bits
        return out

    def keystream(self, n_bits: int) -> np.ndarray:
        """Next *n_bits* keystream bits, in stream order, as a uint8 0/1 vector."""
        if n_bits < 0:
            raise ValueError("n_bits must be non-negative")
        return _bits_from_int(self._take(n_bits), n_bits)

    def skip(self, n_bits: int) -> None:
        while n_bits > 0:
            step = min(n_bits, 1 << 16)
            self._take(step)
            n_bits -= step


def trivium_init(key: bytes, iv: bytes) -> TriviumState:
    return TriviumState(key, iv)


def trivium_keystream(state: TriviumState, n_bits: int) -> tuple[np.ndarray, TriviumState]:
    return state.keystream(n_bits), state


def keystream_bytes(bits: np.ndarray) -> bytes:
    """Render stream bits as bytes, first bit in the least significant position."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


# ── Hashing ───────────────────────────────────────────────────────────────


def sha256(data: bytes) -> Digest256:
    digest = hashes.Hash(hashes.SHA256())
    digest.update(data)
    return digest.finalize()


def hmac_sha256(key: bytes, data: bytes) -> Digest256:
    if not 1 <= len(key) <= HMAC_MAX_KEY_BYTES:
        raise InvalidKey(f"HMAC key must be 1..{HMAC_MAX_KEY_BYTES} bytes, got {len(key)}")
    mac = crypto_hmac.HMAC(key, hashes.SHA256())
    mac.update(data)
    return mac.finalize()


def hmac_verify(tag: bytes, key: bytes, data: bytes) -> bool:
    if not 1 <= len(key) <= HMAC_MAX_KEY_BYTES:
        raise InvalidKey(f"HMAC key must be 1..{HMAC_MAX_KEY_BYTES} bytes, got {len(key)}")
    mac = crypto_hmac.HMAC(key, hashes.SHA256())
    mac.update(data)
    try:
        mac.verify(tag)
    except InvalidSignature:
        return False
    return True


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("XOR operands differ in length")
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(len(a), "big")


# ── Key3 universal-hash MAC ───────────────────────────────────────────────


def _gf128_mul(x: int, y: int) -> int:
    result = 0
    while y:
        if y & 1:
            result ^= x
        y >>= 1
        x <<= 1
        if x >> 128:
            x ^= _GF128_REDUCE
    return result


def _poly_hash(hash_key: int, message: bytes) -> int:
    acc = 0
    for offset in range(0, len(message), 16):
        block = message[offset:offset + 16].ljust(16, b"\x00")
        acc = _gf128_mul(acc ^ int.from_bytes(block, "big"), hash_key)
    # Length block keeps zero-padded messages apart.
    return _gf128_mul(acc ^ (8 * len(message)), hash_key)


def umac_key3(key: KeySource | bytes, message: bytes) -> Digest256:
    """256-bit doctor MAC: polynomial hash over GF(2^128) at Key3, finalized with SHA-256."""
    raw = key if isinstance(key, (bytes, bytearray)) else key.internal_read()
    if len(raw) != KEY3_BYTES:
        raise InvalidKeyLength(f"Key3 must be 128 bits, got {len(raw) * 8}")
    acc = _poly_hash(int.from_bytes(raw, "big"), message)
    return sha256(bytes(raw) + acc.to_bytes(16, "big"))


def umac_verify(tag: bytes, key: KeySource | bytes, message: bytes) -> bool:
    return constant_time.bytes_eq(tag, umac_key3(key, message))
