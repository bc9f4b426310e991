"""Scenario registry for the simulator's security claims."""

from __future__ import annotations

from .base import Scenario, ScenarioResult, ScenarioRun, World, build_world
from .normal import NormalScenario
from .emergent import EmergentScenario
from .recovery import RecoveryScenario
from .replay_attack import ReplayAttackScenario
from .tamper_attack import TamperAttackScenario
from .desync import DesyncScenario
from .impersonation import ImpersonationScenario
from .stolen_card import StolenCardScenario

# Ordered list; `--list` prints them in this order.
ALL_SCENARIOS: list[Scenario] = [
    NormalScenario(),
    EmergentScenario(),
    RecoveryScenario(),
    ReplayAttackScenario(),
    TamperAttackScenario(),
    DesyncScenario(),
    ImpersonationScenario(),
    StolenCardScenario(),
]

SCENARIO_MAP: dict[str, Scenario] = {s.name: s for s in ALL_SCENARIOS}


def get_scenario(name: str) -> Scenario | None:
    """Look up a scenario by its command-line name (e.g. 'replay_attack')."""
    return SCENARIO_MAP.get(name.lower())


__all__ = [
    "Scenario",
    "ScenarioResult",
    "ScenarioRun",
    "World",
    "build_world",
    "ALL_SCENARIOS",
    "SCENARIO_MAP",
    "get_scenario",
    "NormalScenario",
    "EmergentScenario",
    "RecoveryScenario",
    "ReplayAttackScenario",
    "TamperAttackScenario",
    "DesyncScenario",
    "ImpersonationScenario",
    "StolenCardScenario",
]
