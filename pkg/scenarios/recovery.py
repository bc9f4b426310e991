"""HAS-assisted recovery after a lost card, then re-enrollment with a new card."""

from __future__ import annotations

from config import ScenarioConfig
from protocol import ImdMode, PatientCard, enroll_patient
from simnet import FlowStart, Trace, contact

from .base import Scenario, ScenarioRun, build_world


class RecoveryScenario(Scenario):
    @property
    def name(self) -> str:
        return "recovery"

    @property
    def claim(self) -> str:
        return (
            "a security admin answers all 2*S reset challenges through the HAS, the IMD "
            "returns to registration, a new card works and the old card is locked out"
        )

    @property
    def expected(self) -> tuple[str, ...]:
        return ("reset_complete", "session_established", "rejected:")

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        admin_card, admin_password = world.add_doctor("security_admin")
        programmer, has, imd = world.programmer, world.has, world.imd
        old_card = world.card
        new_card = PatientCard.blank(world.rng, config.cache_size, name="new_card")
        world.extra.append(new_card)
        spacing = world.flow_spacing

        def reset():
            programmer.login(has, admin_card.id_p, admin_password, admin_card)
            return programmer.start_recovery(imd.id_i)

        def reenroll_and_access():
            enroll_patient(has, imd, new_card, world.rng, world.theta_ref)
            programmer.login(has, world.doctor_card.id_p, world.password, world.doctor_card)
            programmer.insert_patient_card(new_card)
            return programmer.start_normal(config.request_code)

        def old_card_access():
            programmer.insert_patient_card(old_card)
            return programmer.start_normal(config.request_code)

        flows = [
            FlowStart(0, programmer.name, reset, "recovery"),
            FlowStart(spacing, programmer.name, reenroll_and_access, "re-enrolled access"),
            FlowStart(2 * spacing, programmer.name, old_card_access, "old card access"),
        ]
        channels = world.channels_for(programmer.name) + [contact(programmer.name, new_card.name)]
        return ScenarioRun(world, flows, channels=channels)

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        problems = []
        challenges = trace.messages("ResetChallenge")
        want = 2 * run.world.config.cache_size
        if len(challenges) != want:
            problems.append(f"IMD issued {len(challenges)} reset challenges, expected {want}")
        if run.world.imd.mode is not ImdMode.LISTENING:
            problems.append(f"IMD ended in {run.world.imd.mode.value}")
        return problems
