import numpy as np
import pytest

from crypto import (
    hmac_sha256,
    hmac_verify,
    keystream_bytes,
    sha256,
    trivium_init,
    umac_key3,
    umac_verify,
    xor_bytes,
)
from errors import InvalidKey, InvalidKeyLength, KeyDestroyed
from pok import PokContainer

# eSTREAM Trivium reference output (key, IV, first keystream bytes).
ESTREAM_VECTORS = [
    # Set 1, vector 0
    ("80000000000000000000", "00000000000000000000", "38eb86ff730d7a9caf8df13a4420540d"),
    # Set 2, vector 0
    ("00000000000000000000", "00000000000000000000", "fbe0bf265859051b517a2e4e239fc97f"),
    # Set 6, vector 0
    ("0053a6f94c9ff24598eb", "0d74db42a91077de45ac", "f4cd954a717f26a7"),
]


@pytest.mark.parametrize("key,iv,expected", ESTREAM_VECTORS)
def test_trivium_matches_estream_reference(key, iv, expected):
    state = trivium_init(bytes.fromhex(key), bytes.fromhex(iv))
    n_bits = len(expected) * 4
    assert keystream_bytes(state.keystream(n_bits)).hex() == expected


def test_trivium_is_deterministic():
    key, iv = bytes(range(10)), bytes(range(10, 20))
    a = trivium_init(key, iv).keystream(512)
    b = trivium_init(key, iv).keystream(512)
    assert np.array_equal(a, b)


def test_trivium_one_bit_key_change_changes_stream():
    a = trivium_init(bytes(10), bytes(10)).keystream(256)
    b = trivium_init(b"\x01" + bytes(9), bytes(10)).keystream(256)
    assert not np.array_equal(a, b)


def test_trivium_chunked_reads_equal_one_read():
    key, iv = b"K" * 10, b"V" * 10
    whole = trivium_init(key, iv).keystream(300)
    state = trivium_init(key, iv)
    parts = np.concatenate([state.keystream(n) for n in (1, 63, 64, 100, 72)])
    assert np.array_equal(whole, parts)
    assert state.position == 300


def test_trivium_skip_then_read_equals_slice():
    key, iv = b"K" * 10, b"V" * 10
    whole = trivium_init(key, iv).keystream(1024)
    state = trivium_init(key, iv)
    state.skip(700)
    assert np.array_equal(state.keystream(324), whole[700:])


def test_trivium_zero_bits_leaves_position():
    state = trivium_init(bytes(10), bytes(10))
    assert state.keystream(0).size == 0
    assert state.position == 0


def test_trivium_rejects_wrong_lengths():
    with pytest.raises(InvalidKeyLength):
        trivium_init(bytes(16), bytes(10))
    with pytest.raises(InvalidKeyLength):
        trivium_init(bytes(10), bytes(8))


def test_sha256_nist_vectors():
    assert sha256(b"").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    assert sha256(b"abc").hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_hmac_rfc4231_case_1():
    tag = hmac_sha256(b"\x0b" * 20, b"Hi There")
    assert tag.hex() == "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"
    assert hmac_verify(tag, b"\x0b" * 20, b"Hi There")
    assert not hmac_verify(tag, b"\x0b" * 20, b"Hi there")


def test_hmac_rejects_empty_key():
    with pytest.raises(InvalidKey):
        hmac_sha256(b"", b"data")


def test_umac_distinct_keys_and_tamper():
    rng = np.random.default_rng(5)
    k1, k2 = rng.bytes(16), rng.bytes(16)
    message = b"request for patient 42"
    tag = umac_key3(k1, message)
    assert len(tag) == 32
    assert tag != umac_key3(k2, message)
    assert umac_verify(tag, k1, message)
    flipped = bytes([message[0] ^ 0x01]) + message[1:]
    assert not umac_verify(tag, k1, flipped)


def test_umac_separates_zero_padding():
    key = bytes(range(16))
    assert umac_key3(key, b"abc") != umac_key3(key, b"abc\x00")
    assert umac_key3(key, b"") == umac_key3(key, b"")


def test_umac_reads_through_container():
    container = PokContainer(bytes(range(16)))
    assert umac_key3(container, b"m") == umac_key3(bytes(range(16)), b"m")
    container.tamper()
    with pytest.raises(KeyDestroyed):
        umac_key3(container, b"m")


def test_umac_requires_128_bit_key():
    with pytest.raises(InvalidKeyLength):
        umac_key3(bytes(10), b"m")


def test_xor_bytes():
    assert xor_bytes(b"\x0f\xf0", b"\xff\xff") == b"\xf0\x0f"
    with pytest.raises(ValueError):
        xor_bytes(b"a", b"ab")


def test_hmac_verifies_only_its_own_byte_message():
    key = bytes(range(16))
    messages = [bytes([m]) for m in range(256)]
    tags = [hmac_sha256(key, m) for m in messages]
    assert len(set(tags)) == 256
    for m, tag in enumerate(tags):
        accepted = [n for n, other in enumerate(messages) if hmac_verify(tag, key, other)]
        assert accepted == [m]
        assert not hmac_verify(tag, key[::-1], messages[m])
