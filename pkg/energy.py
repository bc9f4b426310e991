"""IMD-side energy and time accounting on the TelosB model.

Only the IMD is costed.  Computation is charged per operation from the
measured cost table; radio traffic is charged linearly in bits at the rate
of the two measured bundles (320 received bits, 608 sent bits).  Listening
and sleeping are not part of the totals.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum

from errors import LedgerError

logger = logging.getLogger(__name__)

COSTED_ENTITY = "imd"
REFERENCE_ENERGY_UJ = 5306
REFERENCE_TIME_MS = 343


@dataclass(frozen=True)
class PowerModel:
    """Power draw per radio/CPU state, in mW."""

    transmit: float = 69.0
    listen: float = 60.0
    receive: float = 61.0
    compute_active: float = 4.8
    compute_idle: float = 4.5
    sleep: float = 0.035

    @classmethod
    def from_dict(cls, data: dict) -> PowerModel:
        return cls(**{f.name: float(data[f.name]) for f in fields(cls) if f.name in data})


@dataclass(frozen=True)
class OpCost:
    time_ms: float
    energy_uj: float


@dataclass(frozen=True)
class BundleCost:
    bits: int
    time_ms: float
    energy_uj: float


@dataclass(frozen=True)
class OpCostTable:
    generator: OpCost = OpCost(52, 249)
    hmac: OpCost = OpCost(46, 220.8)
    sha256: OpCost = OpCost(15, 72)
    receive: BundleCost = BundleCost(320, 40, 2440)
    send: BundleCost = BundleCost(608, 22, 1518)

    @classmethod
    def from_dict(cls, data: dict) -> OpCostTable:
        defaults = cls()
        kwargs = {}
        for name in ("generator", "hmac", "sha256"):
            if name in data:
                kwargs[name] = OpCost(**data[name])
        for name in ("receive", "send"):
            if name in data:
                kwargs[name] = BundleCost(**data[name])
        return replace(defaults, **kwargs)

    def check_against(self, power: PowerModel, tolerance_uj: float = 1.0) -> None:
        """Every measured energy must equal time x matching power within *tolerance_uj*."""
        pairs = [
            ("generator", self.generator.time_ms, self.generator.energy_uj, power.compute_active),
            ("hmac", self.hmac.time_ms, self.hmac.energy_uj, power.compute_active),
            ("sha256", self.sha256.time_ms, self.sha256.energy_uj, power.compute_active),
            ("receive", self.receive.time_ms, self.receive.energy_uj, power.receive),
            ("send", self.send.time_ms, self.send.energy_uj, power.transmit),
        ]
        for name, time_ms, energy_uj, mw in pairs:
            # mW x ms = uJ
            if abs(time_ms * mw - energy_uj) > tolerance_uj:
                raise LedgerError(
                    f"{name}: {energy_uj} uJ does not match {time_ms} ms at {mw} mW"
                )


class OpKind(str, Enum):
    GENERATOR = "generator"
    HMAC = "hmac"
    SHA256 = "sha256"
    RX = "rx"
    TX = "tx"


@dataclass(frozen=True)
class OpEvent:
    entity: str
    kind: str
    amount: int = 1  # operations, or bits for rx/tx


@dataclass(frozen=True)
class EnergySummary:
    energy_uj: float
    time_ms: float


_COUNT_KEYS = {
    OpKind.GENERATOR: "generator_runs",
    OpKind.HMAC: "hmac_ops",
    OpKind.SHA256: "sha_ops",
    OpKind.RX: "bits_received",
    OpKind.TX: "bits_sent",
}


@dataclass
class EnergyLedger:
    costs: OpCostTable = field(default_factory=OpCostTable)
    counts: dict[str, int] = field(
        default_factory=lambda: {key: 0 for key in _COUNT_KEYS.values()}
    )

    def record(self, event: OpEvent) -> EnergyLedger:
        try:
            kind = OpKind(event.kind)
        except ValueError:
            raise LedgerError(f"unknown ledger event kind {event.kind!r}") from None
        if event.amount < 0:
            raise LedgerError("ledger amounts are non-negative")
        if event.entity != COSTED_ENTITY:
            return self
        self.counts[_COUNT_KEYS[kind]] += event.amount
        return self

    def merge(self, other: EnergyLedger) -> EnergyLedger:
        for key, value in other.counts.items():
            self.counts[key] += value
        return self

    def summarize(self) -> EnergySummary:
        c, t = self.counts, self.costs
        energy = (
            c["generator_runs"] * t.generator.energy_uj
            + c["hmac_ops"] * t.hmac.energy_uj
            + c["sha_ops"] * t.sha256.energy_uj
            + c["bits_received"] * t.receive.energy_uj / t.receive.bits
            + c["bits_sent"] * t.send.energy_uj / t.send.bits
        )
        time = (
            c["generator_runs"] * t.generator.time_ms
            + c["hmac_ops"] * t.hmac.time_ms
            + c["sha_ops"] * t.sha256.time_ms
            + c["bits_received"] * t.receive.time_ms / t.receive.bits
            + c["bits_sent"] * t.send.time_ms / t.send.bits
        )
        return EnergySummary(energy_uj=energy, time_ms=time)


def record(ledger: EnergyLedger, event: OpEvent) -> EnergyLedger:
    return ledger.record(event)


def summarize(ledger: EnergyLedger) -> EnergySummary:
    return ledger.summarize()


def energy_report(ledger: EnergyLedger, cycles: int = 1) -> dict:
    """JSON-ready report; the reference figures are scaled by the number of completed cycles."""
    totals = ledger.summarize()
    expected = {"energy_uJ": REFERENCE_ENERGY_UJ * cycles, "time_ms": REFERENCE_TIME_MS * cycles}
    return {
        "counts": dict(ledger.counts),
        "per_op_costs": {
            "generator": asdict(ledger.costs.generator),
            "hmac": asdict(ledger.costs.hmac),
            "sha256": asdict(ledger.costs.sha256),
            "receive": asdict(ledger.costs.receive),
            "send": asdict(ledger.costs.send),
        },
        "totals": {
            "energy_uJ": round(totals.energy_uj, 3),
            "time_ms": round(totals.time_ms, 3),
        },
        "paper_expected": expected,
        "delta": {
            "energy_uJ": round(totals.energy_uj - expected["energy_uJ"], 3),
            "time_ms": round(totals.time_ms - expected["time_ms"], 3),
        },
    }
