"""A thief with the patient card tries emergent access, a reset, and finally probes the card."""

from __future__ import annotations

from config import ScenarioConfig
from fuzzycommit import sample_iris
from protocol import ImdMode, Programmer, decrypt_sb, refill_cache
from simnet import FlowStart, StealCard, TamperCard, Trace

from .base import Scenario, ScenarioRun, build_world

THIEF = "thief"
# A lookalike's iris: far outside what the code can correct.
LOOKALIKE_BER = 0.35


class StolenCardScenario(Scenario):
    @property
    def name(self) -> str:
        return "stolen_card"

    @property
    def claim(self) -> str:
        return (
            "a stolen card gives no emergent access without the patient's iris, even the whole "
            "decrypted cache cannot answer all 2*S reset challenges, and probing the card "
            "destroys Key1"
        )

    @property
    def expected(self) -> tuple[str, ...]:
        return ("rejected:", "rejected:", "rejected:key_destroyed")

    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        world = build_world(config, seed)
        card = world.card
        refill_cache(world.has, card, config.cache_size)

        # Worst case: the thief also learned Ck and reads every cached SB.
        ck = world.has.patients[card.id_i].ck
        leaked = {item.i: decrypt_sb(ck, item) for item in card.emergency_cache}
        thief = Programmer(THIEF, reset_oracle=leaked.get, ts_ms=config.ts_ms)
        thief.insert_patient_card(card)
        world.extra.append(thief)

        lookalike = sample_iris(world.theta_ref, LOOKALIKE_BER, world.rng)
        spacing = world.flow_spacing
        r = config.request_code
        script = [
            StealCard(at=0, programmer=world.programmer.name),
            TamperCard(at=2 * spacing - 1, card=card.name),
        ]
        flows = [
            FlowStart(0, THIEF, lambda: thief.start_emergent(lookalike, r), "lookalike iris"),
            FlowStart(spacing, THIEF, lambda: thief.start_recovery(world.imd.id_i), "reset from cache"),
            FlowStart(2 * spacing, THIEF, lambda: thief.start_emergent(world.theta_ref, r), "probed card"),
        ]
        channels = world.channels_for(world.programmer.name) + world.channels_for(THIEF)
        return ScenarioRun(world, flows, script=script, channels=channels)

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        world = run.world
        problems = []
        if world.programmer.patient_card is not None:
            problems.append("the card was never taken from the clinic programmer")
        if world.imd.mode is not ImdMode.LISTENING or world.imd.gen_a is None:
            problems.append("the IMD lost its master keys")
        want = f"rejected:bad_reset_response k={world.imd.cycle + world.config.cache_size}"
        if len(trace.flows) > 1 and trace.flows[1].verdict != want:
            problems.append(f"reset flow ended {trace.flows[1].verdict}, expected {want}")
        return problems
