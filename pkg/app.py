"""IMD access-control simulator: command-line scenario runner."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from config import ScenarioConfig, load_scenario_config
from energy import EnergyLedger, energy_report
from errors import ConfigError, ImdSimError
from scenarios import ALL_SCENARIOS, ScenarioResult, get_scenario

logger = logging.getLogger("imdsim")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imdsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and report its verdicts")
    run.add_argument("--scenario", help="scenario name (see --list)")
    run.add_argument("--seed", type=int, help="seed of the first repetition")
    run.add_argument("--repetitions", type=int, help="number of seeded runs")
    run.add_argument("--iris-ber", type=float, dest="iris_ber", help="bit error rate of fresh iris scans")
    run.add_argument("--config", type=Path, help="JSON config file")
    run.add_argument("--trace", type=Path, help="write the event trace (JSONL) here")
    run.add_argument("--energy-report", type=Path, dest="energy_report", help="write the IMD energy report here")
    run.add_argument("--jobs", type=int, default=1, help="worker processes for repetitions")
    run.add_argument("--list", action="store_true", help="list scenarios and the claim each one checks")
    run.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def _run_one(config: ScenarioConfig, seed: int) -> ScenarioResult:
    scenario = get_scenario(config.scenario)
    return scenario.run(config, seed)


def run_repetitions(config: ScenarioConfig, jobs: int = 1) -> list[ScenarioResult]:
    """Run every repetition; results come back in repetition order whatever *jobs* is."""
    seeds = [config.seed + rep for rep in range(config.repetitions)]
    if jobs <= 1 or len(seeds) == 1:
        return [_run_one(config, seed) for seed in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, [config] * len(seeds), seeds))


def merged_ledger(config: ScenarioConfig, results: list[ScenarioResult]) -> EnergyLedger:
    ledger = EnergyLedger(costs=config.costs())
    for result in results:
        for key, value in result.counts.items():
            ledger.counts[key] += value
    return ledger


def _print_list() -> None:
    width = max(len(s.name) for s in ALL_SCENARIOS)
    for scenario in ALL_SCENARIOS:
        print(f"{scenario.name:<{width}}  {scenario.claim}")


def _resolve_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ScenarioConfig:
    base = load_scenario_config(args.config) if args.config else ScenarioConfig()
    if args.scenario is not None and get_scenario(args.scenario) is None:
        parser.error(f"unknown scenario {args.scenario!r}; try --list")
    return base.replace(
        scenario=args.scenario.lower() if args.scenario else None,
        seed=args.seed,
        repetitions=args.repetitions,
        iris_ber=args.iris_ber,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.list:
        _print_list()
        return EXIT_OK

    try:
        config = _resolve_config(args, parser)
    except ConfigError as exc:
        print(f"imdsim: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        results = run_repetitions(config, args.jobs)
    except ImdSimError as exc:
        logger.error("run aborted: %s", exc)
        return EXIT_MISMATCH

    if args.trace:
        args.trace.write_text("".join(r.trace_jsonl for r in results), encoding="utf-8")
    sessions = sum(r.sessions for r in results)
    if args.energy_report:
        report = energy_report(merged_ledger(config, results), cycles=sessions)
        args.energy_report.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    matched = sum(r.passed for r in results)
    total = len(results)
    established = sum(1 for r in results if r.sessions)
    for result in results:
        if not result.passed:
            print(f"seed {result.seed}: {'; '.join(result.problems)}")
    print(f"{config.scenario}: {matched}/{total} runs matched the expected verdicts")
    print(f"success rate: {established / total:.3f} ({established}/{total} runs established a session)")
    return EXIT_OK if matched == total else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
