"""Active bit flips on the air interface, with honest runs in between."""

from __future__ import annotations

from config import ScenarioConfig
from simnet import FlowStart, Tamper, Trace

from .base import Scenario, ScenarioRun, build_world

# hmac_b starts after id_i, i and t1 (3 x 32 bits) and hmac_a (256 bits).
HMAC_B_FIRST_BIT = 96 + 256


class TamperAttackScenario(Scenario):
    @property
    def name(self) -> str:
        return "tamper_attack"

    @property
    def claim(self) -> str:
        return (
            "a flipped bit in the challenge's HMAC_SB is caught by the HAS and a flipped bit in "
            "the token proof by the IMD; the next honest runs still succeed"
        )

    @property
    def expected(self) -> tuple[str, ...]:
        return (
            "rejected:auth_rejected",
            "session_established",
            "rejected:bad_proof",
            "session_established",
        )

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        programmer = world.programmer
        flip = HMAC_B_FIRST_BIT + int(world.rng.integers(0, 256))
        proof_bit = int(world.rng.integers(0, 256))
        # Wireless frame indices: flow 0 is cut after its challenge (0-1),
        # flows 1-3 each carry request, challenge and token (2-4, 5-7, 8-10).
        script = [Tamper(1, (flip,)), Tamper(7, (proof_bit,))]
        start = lambda: programmer.start_normal(config.request_code)  # noqa: E731
        spacing = world.flow_spacing
        flows = [FlowStart(k * spacing, programmer.name, start, f"run {k}") for k in range(4)]
        return ScenarioRun(world, flows, script=script)

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        if trace.messages("TokenSubmit")[0].time < run.world.flow_spacing:
            return ["a token was submitted for the tampered challenge"]
        return []
