"""Shared fixtures: seeded randomness and an enrolled patient/doctor world."""

from __future__ import annotations

import numpy as np
import pytest

from config import ScenarioConfig
from scenarios import World, build_world


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


@pytest.fixture
def config() -> ScenarioConfig:
    # A low PBKDF2 count keeps doctor logins fast in tests.
    return ScenarioConfig(pbkdf2_iterations=10)


@pytest.fixture
def world(config: ScenarioConfig) -> World:
    return build_world(config, seed=7)
