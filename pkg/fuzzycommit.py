"""Biometric key binding for emergent access.

The 140-bit cache key ``Ck`` is split into 20 seven-bit symbols, extended to
32 symbols with a systematic RS(32,20) code over GF(2^7), and every symbol is
spread over a 64-bit first-order Reed-Muller (Hadamard) codeword.  The 2048
code bits are XOR-ed with the reference iris code.  Hadamard decoding fixes
bit noise inside a block, Reed-Solomon fixes whole blocks the Hadamard stage
got wrong.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from reedsolo import ReedSolomonError, RSCodec

from errors import DecodeFailure, InvalidParameter

logger = logging.getLogger(__name__)

IRIS_BITS = 2048
SYMBOL_BITS = 7
RS_N = 32
RS_K = 20
RS_NSYM = RS_N - RS_K
RS_PRIM = 0x89  # x^7 + x^3 + 1
BLOCK_BITS = 64
CACHE_KEY_BITS = RS_K * SYMBOL_BITS
CACHE_KEY_BYTES = (CACHE_KEY_BITS + 7) // 8


# ── Bit-string types ──────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class _BitString:
    bits: np.ndarray
    width = 0

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=np.uint8).reshape(-1)
        if bits.size != self.width:
            raise InvalidParameter(f"{type(self).__name__} needs {self.width} bits, got {bits.size}")
        if np.any(bits > 1):
            raise InvalidParameter(f"{type(self).__name__} holds non-binary values")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.bits.tobytes()))

    def hamming(self, other: _BitString) -> int:
        return int(np.count_nonzero(self.bits != other.bits))


class IrisCode(_BitString):
    width = IRIS_BITS


class LockedCode(_BitString):
    width = IRIS_BITS


@dataclass(frozen=True)
class CacheKey:
    """The cache encryption key ``Ck``: 20 seven-bit symbols."""

    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        symbols = tuple(int(s) for s in self.symbols)
        if len(symbols) != RS_K or any(not 0 <= s < 128 for s in symbols):
            raise InvalidParameter("cache key must be 20 symbols in 0..127")
        object.__setattr__(self, "symbols", symbols)

    def to_bytes(self) -> bytes:
        value = 0
        for sym in self.symbols:
            value = (value << SYMBOL_BITS) | sym
        return value.to_bytes(CACHE_KEY_BYTES, "big")

    @classmethod
    def from_bytes(cls, raw: bytes) -> CacheKey:
        value = int.from_bytes(raw, "big")
        if value >> CACHE_KEY_BITS:
            raise InvalidParameter("cache key wider than 140 bits")
        return cls(tuple((value >> (SYMBOL_BITS * (RS_K - 1 - k))) & 0x7F for k in range(RS_K)))


def random_cache_key(rng: np.random.Generator) -> CacheKey:
    return CacheKey(tuple(int(s) for s in rng.integers(0, 128, size=RS_K)))


def random_iris(rng: np.random.Generator) -> IrisCode:
    return IrisCode(rng.integers(0, 2, size=IRIS_BITS, dtype=np.uint8))


# ── Hadamard / RM(1,6) ────────────────────────────────────────────────────


@lru_cache(maxsize=1)
def _codebook() -> np.ndarray:
    """128 x 64 table; row s is the codeword of symbol s (bit 6 of s complements)."""
    x = np.arange(BLOCK_BITS)
    u = np.arange(BLOCK_BITS)[:, None]
    masked = u & x
    parity = np.zeros((BLOCK_BITS, BLOCK_BITS), dtype=np.uint8)
    for k in range(6):
        parity ^= ((masked >> k) & 1).astype(np.uint8)
    book = np.concatenate([parity, parity ^ 1])
    book.setflags(write=False)
    return book


def _fwht(values: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the last axis (length 64), natural order."""
    lead = values.shape[:-1]
    out = values.astype(np.int64)
    h = 1
    while h < BLOCK_BITS:
        out = out.reshape(*lead, BLOCK_BITS // (2 * h), 2, h)
        a, b = out[..., 0, :], out[..., 1, :]
        out = np.stack((a + b, a - b), axis=-2).reshape(*lead, BLOCK_BITS)
        h *= 2
    return out


def hadamard_encode(symbol: int) -> np.ndarray:
    if not 0 <= symbol < 128:
        raise InvalidParameter(f"symbol {symbol} outside 0..127")
    return _codebook()[symbol].copy()


def _hadamard_decode_blocks(words: np.ndarray) -> np.ndarray:
    corr = _fwht(1 - 2 * words.astype(np.int64))
    # Score of symbol s is 64 - 2*distance; argmax keeps the lowest symbol on ties.
    scores = np.concatenate([corr, -corr], axis=-1)
    return np.argmax(scores, axis=-1)


def hadamard_decode(word: np.ndarray) -> int:
    word = np.asarray(word, dtype=np.uint8).reshape(-1)
    if word.size != BLOCK_BITS:
        raise InvalidParameter(f"Hadamard word must be 64 bits, got {word.size}")
    return int(_hadamard_decode_blocks(word[None, :])[0])


# ── Reed-Solomon RS(32,20) over GF(2^7) ───────────────────────────────────


@lru_cache(maxsize=1)
def _rs_codec() -> RSCodec:
    return RSCodec(RS_NSYM, nsize=RS_N, c_exp=SYMBOL_BITS, prim=RS_PRIM)


def rs_encode(data: list[int] | tuple[int, ...]) -> list[int]:
    if len(data) != RS_K or any(not 0 <= int(s) < 128 for s in data):
        raise InvalidParameter("RS input must be 20 symbols in 0..127")
    return list(_rs_codec().encode(bytearray(int(s) for s in data)))


def rs_decode(word: list[int] | tuple[int, ...]) -> list[int]:
    if len(word) != RS_N or any(not 0 <= int(s) < 128 for s in word):
        raise InvalidParameter("RS word must be 32 symbols in 0..127")
    try:
        decoded = _rs_codec().decode(bytearray(int(s) for s in word))[0]
    # gf_div raises ZeroDivisionError on some uncorrectable words.
    except (ReedSolomonError, ZeroDivisionError) as exc:
        raise DecodeFailure(f"Reed-Solomon decoding failed: {exc}") from exc
    return list(decoded)


# ── Lock / unlock ─────────────────────────────────────────────────────────


def _codeword(ck: CacheKey) -> np.ndarray:
    return _codebook()[np.array(rs_encode(ck.symbols))].reshape(-1)


def lock(ck: CacheKey, theta_ref: IrisCode) -> LockedCode:
    return LockedCode(_codeword(ck) ^ theta_ref.bits)


def unlock(locked: LockedCode, theta_sam: IrisCode) -> CacheKey:
    noisy = (locked.bits ^ theta_sam.bits).reshape(RS_N, BLOCK_BITS)
    symbols = _hadamard_decode_blocks(noisy)
    return CacheKey(tuple(rs_decode([int(s) for s in symbols])))


def sample_iris(
    theta_ref: IrisCode, ber: float, rng_seed: int | np.random.Generator | None
) -> IrisCode:
    """Synthetic fresh capture: every bit flips independently with probability *ber*."""
    if not 0.0 <= ber <= 0.5:
        raise InvalidParameter(f"bit error rate {ber} outside [0, 0.5]")
    rng = np.random.default_rng(rng_seed)
    flips = (rng.random(IRIS_BITS) < ber).astype(np.uint8)
    return IrisCode(theta_ref.bits ^ flips)


def unlock_success_rate(ber: float, trials: int, seed: int) -> float:
    """Monte-Carlo fraction of fresh samples at *ber* that recover the right key."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        ck = random_cache_key(rng)
        theta = random_iris(rng)
        locked = lock(ck, theta)
        try:
            hits += unlock(locked, sample_iris(theta, ber, rng)) == ck
        except DecodeFailure:
            pass
    rate = hits / trials if trials else 0.0
    logger.debug("unlock success at BER %.3f: %d/%d", ber, hits, trials)
    return rate
