"""HMAC inputs, the access token and the session key.

All concatenations are big-endian 32-bit fields in the order written:
``T1`` (32 bits) for the IMD's SA check, ``T1||ID_P||ID_I`` (96 bits) for its
SB check, ``T1||R`` (64 bits) for the card share and ``T1||ID_P||ID_I||R``
(128 bits) for the HAS share.
"""

from __future__ import annotations

import struct

from crypto import hmac_sha256, sha256, xor_bytes

U32 = 0xFFFFFFFF


def challenge_a_input(t1: int) -> bytes:
    return struct.pack(">I", t1 & U32)


def challenge_b_input(t1: int, id_p: int, id_i: int) -> bytes:
    return struct.pack(">III", t1 & U32, id_p, id_i)


def card_share_input(t1: int, r: int) -> bytes:
    return struct.pack(">II", t1 & U32, r)


def has_share_input(t1: int, id_p: int, id_i: int, r: int) -> bytes:
    return struct.pack(">IIII", t1 & U32, id_p, id_i, r)


def card_share(sa: bytes, t1: int, r: int) -> bytes:
    return hmac_sha256(sa, card_share_input(t1, r))


def has_share(sb: bytes, t1: int, id_p: int, id_i: int, r: int) -> bytes:
    return hmac_sha256(sb, has_share_input(t1, id_p, id_i, r))


def assemble_token(card_resp: bytes, has_resp: bytes) -> bytes:
    return xor_bytes(card_resp, has_resp)


def token_proof(t1: int, token: bytes) -> bytes:
    return sha256(struct.pack(">I", t1 & U32) + token)


def session_key(card_resp: bytes, has_resp: bytes) -> bytes:
    return xor_bytes(sha256(card_resp), sha256(has_resp))


def elapsed_ms(now: int, t1: int) -> int:
    """Signed distance from the 32-bit timestamp *t1* to *now*, modulo 2^32."""
    diff = (now - t1) & U32
    return diff - (1 << 32) if diff >= 1 << 31 else diff
