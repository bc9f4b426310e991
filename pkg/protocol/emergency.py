"""Emergency cache items: SB_i encrypted under the iris-bound cache key Ck."""

from __future__ import annotations

import struct
from dataclasses import dataclass

from crypto import sha256, xor_bytes
from fuzzycommit import CacheKey

BLOCK_BYTES = 32


@dataclass(frozen=True)
class CacheItem:
    i: int
    ct: bytes

    def __repr__(self) -> str:
        return f"CacheItem(i={self.i}, ct={self.ct[:4].hex()}..)"


def _keystream(ck: CacheKey, i: int, n_bytes: int) -> bytes:
    # Block j is sha256(Ck || i || j); a 256-bit SB fits in block 0.
    ck_bytes = ck.to_bytes()
    blocks = []
    for j in range(-(-n_bytes // BLOCK_BYTES)):
        blocks.append(sha256(ck_bytes + struct.pack(">II", i, j)))
    return b"".join(blocks)[:n_bytes]


def encrypt_sb(ck: CacheKey, i: int, sb: bytes) -> CacheItem:
    return CacheItem(i, xor_bytes(sb, _keystream(ck, i, len(sb))))


def decrypt_sb(ck: CacheKey, item: CacheItem) -> bytes:
    return xor_bytes(item.ct, _keystream(ck, item.i, len(item.ct)))
