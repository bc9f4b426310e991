import numpy as np
import pytest

from errors import DesyncError, InvalidCycle, KeyDestroyed
from keygen import DERIVED_CACHE_SIZE, KeyGenerator, Lineage, derive_key
from pok import PokContainer

IV = bytes(range(20, 30))


def generator(secret: bytes = bytes(range(10)), lineage: Lineage = Lineage.SA, **kwargs) -> KeyGenerator:
    return KeyGenerator(PokContainer(secret), IV, lineage, **kwargs)


def test_derive_is_pure_and_256_bits():
    gen = generator()
    key = derive_key(gen, 3)
    assert len(key.key) == 32
    assert key == gen.derive_key(3)
    gen.advance()
    assert gen.derive_key(3) == key


def test_distinct_masters_give_distinct_keys():
    a = generator(bytes(range(10))).derive_key(1)
    b = generator(bytes(range(1, 11)), Lineage.SB).derive_key(1)
    assert a.key != b.key


def test_distinct_cycles_give_distinct_keys():
    gen = generator()
    assert gen.derive_key(1).key != gen.derive_key(2).key


def test_cycle_zero_rejected():
    with pytest.raises(InvalidCycle):
        generator().derive_key(0)


def test_advance_keeps_one_step_cache():
    gen = generator()
    gen.advance()
    assert gen.cycle == 2
    assert gen.cache_prev.cycle == 1
    gen.advance()
    assert gen.cache_prev.cycle == 2
    assert gen.accepted_counters() == {2, 3}


def test_resolve_window():
    gen = generator()
    for _ in range(4):
        gen.advance()
    assert gen.cycle == 5
    current = gen.resolve_for_counter(5)
    assert not current.recovered and current.key.cycle == 5
    behind = gen.resolve_for_counter(4)
    assert behind.recovered and behind.key == gen.derive_key(4)
    with pytest.raises(DesyncError):
        gen.resolve_for_counter(7)
    with pytest.raises(DesyncError):
        gen.resolve_for_counter(3)


def test_cache_disabled_has_no_recovery_path():
    gen = generator(cache_enabled=False)
    gen.advance()
    with pytest.raises(DesyncError):
        gen.resolve_for_counter(1)


def test_tampered_master_refuses_even_cached_key():
    container = PokContainer(bytes(range(10)))
    gen = KeyGenerator(container, IV, Lineage.SA)
    gen.advance()
    container.tamper()
    with pytest.raises(KeyDestroyed):
        gen.resolve_for_counter(1)
    with pytest.raises(KeyDestroyed):
        gen.derive_key(2)


def test_random_access_matches_sequential_derivation():
    sequential = generator()
    expected = {}
    for i in range(1, 33):
        expected[i] = sequential.current_key()
        sequential.advance()
    order = np.random.default_rng(5).permutation(np.arange(1, 33))
    shuffled = generator()
    for i in order:
        assert shuffled.derive_key(int(i)) == expected[int(i)]


def test_tamper_drops_derived_keys():
    container = PokContainer(bytes(range(10)))
    gen = KeyGenerator(container, IV, Lineage.SA)
    gen.derive_key(1)
    gen.advance()
    container.tamper()
    with pytest.raises(KeyDestroyed):
        gen.derive_key(1)
    assert gen.cache_prev is None
    assert not gen._derived


def test_derived_key_memory_is_bounded():
    gen = generator()
    for i in range(1, DERIVED_CACHE_SIZE + 6):
        gen.derive_key(i)
    assert len(gen._derived) == DERIVED_CACHE_SIZE
    assert 1 not in gen._derived
    assert gen.derive_key(1) == generator().derive_key(1)
