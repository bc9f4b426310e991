"""Someone who is not the doctor tries to pass as the doctor to the HAS."""

from __future__ import annotations

from config import ScenarioConfig
from protocol import DoctorCard, Programmer
from simnet import FlowStart, Trace

from .base import Scenario, ScenarioRun, build_world

ATTACKER = "attacker"


class ImpersonationScenario(Scenario):
    @property
    def name(self) -> str:
        return "impersonation"

    @property
    def claim(self) -> str:
        return (
            "holding the patient card is not enough: without a login, with a stolen password "
            "alone, or with a forged doctor card the HAS refuses its share"
        )

    @property
    def expected(self) -> tuple[str, ...]:
        return (
            "rejected:bad_doctor_identity",
            "rejected:bad_doctor_identity",
            "rejected:bad_doctor_identity",
            "session_established",
        )

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        victim = world.doctor_card.id_p
        attacker = Programmer(ATTACKER, id_p=victim, ts_ms=config.ts_ms)
        attacker.insert_patient_card(world.card)
        forged = DoctorCard.blank(victim, world.rng)
        world.extra.append(attacker)
        honest = world.programmer
        r = config.request_code

        def with_password():
            attacker.login(world.has, victim, world.password)
            return attacker.start_normal(r)

        def with_forged_card():
            attacker.insert_doctor_card(forged)
            return attacker.start_normal(r)

        spacing = world.flow_spacing
        flows = [
            FlowStart(0, ATTACKER, lambda: attacker.start_normal(r), "no login"),
            FlowStart(spacing, ATTACKER, with_password, "stolen password"),
            FlowStart(2 * spacing, ATTACKER, with_forged_card, "forged doctor card"),
            FlowStart(3 * spacing, honest.name, lambda: honest.start_normal(r), "real doctor"),
        ]
        channels = world.channels_for(honest.name) + world.channels_for(ATTACKER)
        return ScenarioRun(world, flows, channels=channels)

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        if run.world.has.sessions.get(ATTACKER) is None:
            return ["the stolen password did not open a HAS session"]
        return []
