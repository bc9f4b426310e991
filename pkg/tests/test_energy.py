import pytest

from energy import (
    EnergyLedger,
    OpCostTable,
    OpEvent,
    PowerModel,
    energy_report,
    record,
    summarize,
)
from errors import LedgerError


def honest_cycle() -> EnergyLedger:
    ledger = EnergyLedger()
    for kind, amount in [("generator", 1), ("hmac", 4), ("sha256", 3), ("rx", 320), ("tx", 608)]:
        record(ledger, OpEvent("imd", kind, amount))
    return ledger


def test_one_honest_cycle_matches_reference_totals():
    totals = summarize(honest_cycle())
    assert totals.energy_uj == pytest.approx(5306.2)
    assert abs(totals.energy_uj - 5306) <= 1
    assert totals.time_ms == pytest.approx(343)


def test_empty_ledger_is_zero():
    totals = EnergyLedger().summarize()
    assert totals.energy_uj == 0 and totals.time_ms == 0


def test_other_entities_are_not_costed():
    ledger = EnergyLedger()
    ledger.record(OpEvent("has", "hmac", 10))
    assert ledger.counts["hmac_ops"] == 0


def test_bad_events_rejected():
    with pytest.raises(LedgerError):
        EnergyLedger().record(OpEvent("imd", "fft"))
    with pytest.raises(LedgerError):
        EnergyLedger().record(OpEvent("imd", "rx", -1))


def test_cost_table_consistent_with_power_model():
    OpCostTable().check_against(PowerModel())
    with pytest.raises(LedgerError):
        OpCostTable.from_dict({"hmac": {"time_ms": 46, "energy_uj": 300}}).check_against(PowerModel())


def test_merge_adds_counts():
    merged = honest_cycle().merge(honest_cycle())
    assert merged.counts["hmac_ops"] == 8
    assert merged.summarize().time_ms == pytest.approx(686)


def test_report_shape():
    report = energy_report(honest_cycle())
    assert report["counts"] == {
        "generator_runs": 1,
        "hmac_ops": 4,
        "sha_ops": 3,
        "bits_received": 320,
        "bits_sent": 608,
    }
    assert report["totals"] == {"energy_uJ": 5306.2, "time_ms": 343.0}
    assert report["paper_expected"] == {"energy_uJ": 5306, "time_ms": 343}
    assert report["delta"]["time_ms"] == 0
    assert report["per_op_costs"]["receive"]["bits"] == 320
