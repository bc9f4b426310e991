"""Honest normal access: doctor card, patient card and HAS all present."""

from __future__ import annotations

from config import ScenarioConfig
from simnet import FlowStart, Trace

from .base import Scenario, ScenarioRun, build_world, session_keys_agree

# Per honest cycle the IMD hears a request and a token and sends one challenge.
HONEST_RX_BITS = 64 + 256
HONEST_TX_BITS = 608


class NormalScenario(Scenario):
    @property
    def name(self) -> str:
        return "normal"

    @property
    def claim(self) -> str:
        return "an authorized doctor touching the patient gets a session; both ends derive the same SKey"

    @property
    def expected(self) -> tuple[str, ...]:
        return ("session_established",)

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        programmer = world.programmer
        flow = FlowStart(0, programmer.name, lambda: programmer.start_normal(config.request_code), "normal")
        return ScenarioRun(world, [flow])

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        world = run.world
        problems = session_keys_agree(world.programmer, world.imd)
        counts = world.ledger.counts
        if counts["bits_received"] != HONEST_RX_BITS or counts["bits_sent"] != HONEST_TX_BITS:
            problems.append(
                f"IMD moved {counts['bits_received']}/{counts['bits_sent']} bits, "
                f"expected {HONEST_RX_BITS}/{HONEST_TX_BITS}"
            )
        if world.imd.cycle != 2 or world.card.cycle != 2:
            problems.append("counters did not advance together")
        return problems
