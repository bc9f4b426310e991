"""Offline emergent access through the iris-locked emergency cache."""

from __future__ import annotations

from config import ScenarioConfig
from fuzzycommit import sample_iris
from protocol import Programmer, refill_cache
from simnet import FlowStart, Trace

from .base import Scenario, ScenarioRun, build_world, session_keys_agree


class EmergentScenario(Scenario):
    @property
    def name(self) -> str:
        return "emergent"

    @property
    def claim(self) -> str:
        return (
            "a first aider with the patient's card and a fresh iris scan reaches the IMD "
            "without the HAS (success depends on the scan's bit error rate)"
        )

    @property
    def expected(self) -> tuple[str, ...]:
        return ("session_established",)

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        refill_cache(world.has, world.card, config.cache_size)

        # Nobody is logged in to the HAS and the server link is never used.
        first_aider = Programmer(ts_ms=config.ts_ms)
        first_aider.insert_patient_card(world.card)
        world.programmer = first_aider
        theta_sam = sample_iris(world.theta_ref, config.iris_ber, world.rng)
        flow = FlowStart(0, first_aider.name, lambda: first_aider.start_emergent(theta_sam), "emergent")
        return ScenarioRun(world, [flow])

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        if not trace.established():
            return []
        problems = session_keys_agree(run.world.programmer, run.world.imd)
        if trace.messages("HasAuthRequest"):
            problems.append("emergent access contacted the HAS")
        return problems
