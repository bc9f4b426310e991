import numpy as np
import pytest

from errors import InvalidSecret, KeyDestroyed, OtpFused
from pok import OtpState, PokContainer, ServerKey, TamperState, otp_extract, pok_provision

SECRET = bytes(range(10))


def test_extract_once_then_fused():
    container = pok_provision(SECRET, "card")
    assert otp_extract(container) == SECRET
    assert container.otp_state is OtpState.FUSED
    with pytest.raises(OtpFused):
        container.otp_extract()


def test_internal_read_survives_fuse():
    container = PokContainer(SECRET)
    container.otp_extract()
    assert container.internal_read() == SECRET


def test_tamper_destroys_every_path():
    container = PokContainer(SECRET)
    container.tamper()
    assert container.tamper_state is TamperState.DESTROYED
    assert not container.sound
    with pytest.raises(KeyDestroyed):
        container.internal_read()
    with pytest.raises(KeyDestroyed):
        container.otp_extract()


def test_tamper_is_idempotent():
    container = PokContainer(SECRET)
    container.tamper()
    before = repr(container)
    container.tamper()
    assert repr(container) == before


def test_containers_are_independent():
    a, b = PokContainer(SECRET), PokContainer(SECRET)
    a.tamper()
    assert b.internal_read() == SECRET


def test_empty_secret_rejected():
    with pytest.raises(InvalidSecret):
        PokContainer(b"")
    with pytest.raises(InvalidSecret):
        ServerKey(b"")


@pytest.mark.parametrize("seed", range(20))
def test_random_call_sequences(seed):
    rng = np.random.default_rng(seed)
    container = PokContainer(SECRET)
    calls = {"extract": container.otp_extract, "read": container.internal_read, "tamper": container.tamper}
    extracted = 0
    tampered = False
    for name in rng.choice(sorted(calls), size=12):
        try:
            out = calls[name]()
        except (KeyDestroyed, OtpFused):
            continue
        # Nothing comes out of a destroyed container.
        assert not tampered or out is None
        if name == "extract":
            extracted += 1
        tampered = tampered or name == "tamper"
    assert extracted <= 1
    if tampered:
        assert container.tamper_state is TamperState.DESTROYED
        with pytest.raises(KeyDestroyed):
            container.internal_read()
