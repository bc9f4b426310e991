"""Replay of recorded over-the-air frames after an honest session."""

from __future__ import annotations

from config import ScenarioConfig
from protocol import SessionEstablished
from simnet import Eavesdrop, FlowStart, Replay, Trace

from .base import Scenario, ScenarioRun, build_world

# Wireless frames of one honest flow, in the order the adversary sees them.
REQUEST, CHALLENGE, TOKEN = 0, 1, 2


class ReplayAttackScenario(Scenario):
    @property
    def name(self) -> str:
        return "replay_attack"

    @property
    def claim(self) -> str:
        return "re-sending a recorded service request and token never opens a second session"

    @property
    def expected(self) -> tuple[str, ...]:
        return ("session_established",)

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        programmer = world.programmer
        later = world.flow_spacing
        script = [
            Eavesdrop(),
            # Token alone while the IMD listens, then request + token together.
            Replay(TOKEN, at=later),
            Replay(REQUEST, at=2 * later),
            Replay(TOKEN, at=2 * later + 5),
        ]
        flow = FlowStart(0, programmer.name, lambda: programmer.start_normal(config.request_code), "honest")
        return ScenarioRun(world, [flow], script=script)

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        problems = []
        sessions = [o for _, _, o in trace.verdicts if isinstance(o, SessionEstablished)]
        if len(sessions) != 1:
            problems.append(f"{len(sessions)} sessions established, expected only the honest one")
        if len(trace.messages("TokenSubmit")) != 3:
            problems.append("replayed tokens did not all reach the IMD")
        if run.world.imd.cycle != 2:
            problems.append(f"IMD cycle moved to {run.world.imd.cycle}")
        return problems
