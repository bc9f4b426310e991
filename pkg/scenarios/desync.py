"""Lost card reply leaves the card one cycle ahead; the one-step cache absorbs it."""

from __future__ import annotations

from config import ScenarioConfig
from simnet import Drop, FlowStart, Trace

from .base import Scenario, ScenarioRun, build_world

# Contact frames of the first flow: request to the card (0), its reply (1).
CARD_REPLY = 1


class DesyncScenario(Scenario):
    @property
    def name(self) -> str:
        return "desync"

    @property
    def claim(self) -> str:
        return (
            "when the card's share is lost after the card has advanced, the IMD times out, "
            "and the next two accesses succeed without any resynchronisation step"
        )

    @property
    def expected(self) -> tuple[str, ...]:
        return ("rejected:timeout", "session_established", "session_established")

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        programmer = world.programmer
        start = lambda: programmer.start_normal(config.request_code)  # noqa: E731
        spacing = world.flow_spacing
        flows = [
            FlowStart(0, programmer.name, start, "reply lost"),
            FlowStart(spacing, programmer.name, start, "catch-up"),
            FlowStart(2 * spacing, programmer.name, start, "in step"),
        ]
        return ScenarioRun(world, flows, script=[Drop(CARD_REPLY)], hooked=("contact",))

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        world = run.world
        cycles = {"imd": world.imd.cycle, "card": world.card.cycle}
        if len(set(cycles.values())) != 1 or world.imd.cycle != 3:
            return [f"counters ended at {cycles}, expected all at 3"]
        return []
