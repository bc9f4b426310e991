"""Configuration management for the IMD access-control simulator."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from energy import OpCostTable, PowerModel
from errors import ConfigError, LedgerError

CONFIG_PATH = Path(__file__).parent / "config.json"

SCENARIO_NAMES = (
    "normal",
    "emergent",
    "recovery",
    "replay_attack",
    "tamper_attack",
    "desync",
    "impersonation",
    "stolen_card",
)

DEFAULTS = {
    "scenario": "normal",
    "seed": 1,
    "ts_ms": 5000,
    "iris_ber": 0.10,
    "cache_size": 4,
    "repetitions": 1,
    "wireless_latency_ms": 1,
    "server_latency_ms": 10,
    "request_code": 1,
    "pbkdf2_iterations": 1000,
    "power_model": {},  # overrides for the TelosB power table, in mW
    "op_costs": {},     # overrides for the measured per-operation costs
}


@dataclass
class ScenarioConfig:
    scenario: str = DEFAULTS["scenario"]
    seed: int = DEFAULTS["seed"]
    ts_ms: int = DEFAULTS["ts_ms"]
    iris_ber: float = DEFAULTS["iris_ber"]
    cache_size: int = DEFAULTS["cache_size"]
    repetitions: int = DEFAULTS["repetitions"]
    wireless_latency_ms: int = DEFAULTS["wireless_latency_ms"]
    server_latency_ms: int = DEFAULTS["server_latency_ms"]
    request_code: int = DEFAULTS["request_code"]
    pbkdf2_iterations: int = DEFAULTS["pbkdf2_iterations"]
    power_model: dict = field(default_factory=dict)
    op_costs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.scenario not in SCENARIO_NAMES:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must fit in 64 bits")
        if self.ts_ms < 0:
            raise ConfigError("ts_ms must be non-negative")
        if not 0.0 <= self.iris_ber <= 0.5:
            raise ConfigError("iris_ber must be within [0, 0.5]")
        if self.cache_size < 1:
            raise ConfigError("cache_size must be at least 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        if self.wireless_latency_ms < 0 or self.server_latency_ms < 0:
            raise ConfigError("latencies must be non-negative")
        if self.request_code not in (1, 2):
            raise ConfigError("request_code must be 1 (read) or 2 (reprogram)")
        if self.pbkdf2_iterations < 1:
            raise ConfigError("pbkdf2_iterations must be at least 1")
        try:
            self.costs().check_against(self.power())
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad energy table override: {exc}") from exc
        except LedgerError as exc:
            raise ConfigError(f"energy table override breaks energy = time x power: {exc}") from exc

    def power(self) -> PowerModel:
        return PowerModel.from_dict(self.power_model)

    def costs(self) -> OpCostTable:
        return OpCostTable.from_dict(self.op_costs)

    @classmethod
    def from_dict(cls, data: dict) -> ScenarioConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> ScenarioConfig:
        data = self.to_dict()
        data.update({k: v for k, v in changes.items() if v is not None})
        return ScenarioConfig.from_dict(data)


def load_config(path: str | Path | None = None) -> dict:
    """Load config from disk, creating it with defaults if missing."""
    path = Path(path) if path else CONFIG_PATH
    if path.exists():
        with open(path, "r", encoding="utf-8") as f:
            try:
                config = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
        # Merge any new default keys the file doesn't have yet
        for key, value in DEFAULTS.items():
            if key not in config:
                config[key] = value
        return config
    # First run: write defaults
    save_config(DEFAULTS, path)
    return dict(DEFAULTS)


def save_config(config: dict, path: str | Path | None = None) -> None:
    """Persist config to disk."""
    path = Path(path) if path else CONFIG_PATH
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config, f, indent=2, ensure_ascii=False)


def load_scenario_config(path: str | Path | None = None) -> ScenarioConfig:
    return ScenarioConfig.from_dict(load_config(path))
