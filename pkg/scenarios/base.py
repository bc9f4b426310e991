"""Abstract base class for security scenarios, plus the shared enrolled world."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from config import ScenarioConfig
from energy import EnergyLedger
from errors import ScenarioStalled
from fuzzycommit import IrisCode, random_iris
from protocol import (
    DoctorCard,
    Entity,
    Has,
    Imd,
    PatientCard,
    Programmer,
    enroll_doctor,
    enroll_patient,
)
from simnet import Channel, FlowStart, Trace, contact, run_scenario, server_pipe, wireless

logger = logging.getLogger(__name__)

ID_SPACE = 1 << 30


@dataclass
class World:
    """An enrolled patient (IMD + card), a HAS and one logged-in chief physician."""

    config: ScenarioConfig
    rng: np.random.Generator
    imd: Imd
    has: Has
    card: PatientCard
    theta_ref: IrisCode
    doctor_card: DoctorCard
    password: str
    programmer: Programmer
    extra: list[Entity] = field(default_factory=list)

    @property
    def ledger(self) -> EnergyLedger:
        return self.imd.ledger

    @property
    def entities(self) -> list[Entity]:
        return [self.programmer, self.imd, self.has, self.card, *self.extra]

    @property
    def flow_spacing(self) -> int:
        """Gap between flows, long enough for every expiry timer of the previous one."""
        return 2 * self.config.ts_ms + 1000

    def channels_for(self, programmer: str) -> list[Channel]:
        cfg = self.config
        return [
            wireless(programmer, self.imd.name, cfg.wireless_latency_ms),
            server_pipe(programmer, self.has.name, cfg.server_latency_ms),
            contact(programmer, self.card.name),
        ]

    def add_doctor(self, role: str, patients: frozenset[int] | None = None) -> tuple[DoctorCard, str]:
        return _new_doctor(self.has, self.rng, role, patients)


def _new_doctor(
    has: Has, rng: np.random.Generator, role: str, patients: frozenset[int] | None = None
) -> tuple[DoctorCard, str]:
    id_p = int(rng.integers(1, ID_SPACE))
    while id_p in has.doctors:
        id_p = int(rng.integers(1, ID_SPACE))
    card = DoctorCard.blank(id_p, rng)
    password = rng.bytes(8).hex()
    enroll_doctor(has, card, password, role, rng, patients)
    return card, password


def build_world(config: ScenarioConfig, seed: int) -> World:
    rng = np.random.default_rng(seed)
    ledger = EnergyLedger(costs=config.costs())
    imd = Imd(int(rng.integers(1, ID_SPACE)), config.ts_ms, config.cache_size, ledger)
    has = Has(config.ts_ms, config.cache_size, config.pbkdf2_iterations)
    card = PatientCard.blank(rng, config.cache_size)
    theta_ref = random_iris(rng)
    enroll_patient(has, imd, card, rng, theta_ref)

    doctor_card, password = _new_doctor(has, rng, "chief")
    programmer = Programmer(ts_ms=config.ts_ms)
    programmer.login(has, doctor_card.id_p, password, doctor_card)
    programmer.insert_patient_card(card)
    return World(config, rng, imd, has, card, theta_ref, doctor_card, password, programmer)


@dataclass
class ScenarioRun:
    world: World
    flows: list[FlowStart]
    script: list | None = None
    hooked: tuple[str, ...] = ("wireless",)
    channels: list[Channel] = field(default_factory=list)
    entities: list[Entity] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.channels:
            self.channels = self.world.channels_for(self.world.programmer.name)
        if not self.entities:
            self.entities = self.world.entities


@dataclass
class ScenarioResult:
    scenario: str
    seed: int
    passed: bool
    verdicts: list[str]
    problems: list[str]
    counts: dict[str, int]
    sessions: int
    trace_jsonl: str


class Scenario(ABC):
    """One security claim, exercised as a scripted run of the simulator.

    Each scenario knows how to:
    - Build an enrolled world, the flows to start and the adversary script
    - State the verdict every flow must reach
    - Check scenario-specific properties of the finished run
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Scenario name used on the command line, e.g. 'replay_attack'."""

    @property
    @abstractmethod
    def claim(self) -> str:
        """The property of the scheme this scenario demonstrates."""

    @property
    @abstractmethod
    def expected(self) -> tuple[str, ...]:
        """Verdict per flow, in start order.  A trailing ':' matches by prefix."""

    @abstractmethod
    def build(self, config: ScenarioConfig, seed: int) -> ScenarioRun:
        """Set up the world and return what to run."""

    def check(self, run: ScenarioRun, trace: Trace) -> list[str]:
        """Extra problems beyond the per-flow verdicts.  Empty means fine."""
        return []

    def run(self, config: ScenarioConfig, seed: int) -> ScenarioResult:
        run = self.build(config, seed)
        try:
            trace = run_scenario(run.entities, run.channels, run.flows, run.script, seed, hooked=run.hooked)
            problems = self._match_verdicts(trace) + self.check(run, trace)
        except ScenarioStalled as exc:
            trace = exc.trace
            problems = [f"stalled: {exc}"]
        if problems:
            logger.info("%s seed=%d: %s", self.name, seed, "; ".join(problems))
        return ScenarioResult(
            scenario=self.name,
            seed=seed,
            passed=not problems,
            verdicts=[flow.verdict for flow in trace.flows],
            problems=problems,
            counts=dict(run.world.ledger.counts),
            sessions=len(trace.established()),
            trace_jsonl=trace.to_jsonl(),
        )

    def _match_verdicts(self, trace: Trace) -> list[str]:
        got = [flow.verdict for flow in trace.flows]
        if len(got) != len(self.expected):
            return [f"expected {len(self.expected)} flows, got {len(got)}"]
        problems = []
        for index, (want, have) in enumerate(zip(self.expected, got)):
            ok = have.startswith(want) if want.endswith(":") else have == want
            if not ok:
                problems.append(f"flow {index}: expected {want}, got {have}")
        return problems


def session_keys_agree(programmer: Programmer, imd: Imd) -> list[str]:
    if programmer.session_key is None or programmer.session_key != imd.session_key:
        return ["programmer and IMD session keys differ"]
    return []
