import json

import pytest

from config import DEFAULTS, ScenarioConfig, load_config, load_scenario_config, save_config
from errors import ConfigError


def test_defaults_round_trip():
    config = ScenarioConfig()
    assert config.to_dict() == DEFAULTS
    assert ScenarioConfig.from_dict(config.to_dict()) == config


def test_file_round_trip(tmp_path):
    path = tmp_path / "config.json"
    config = ScenarioConfig(
        scenario="desync", seed=99, cache_size=6, op_costs={"sha256": {"time_ms": 15, "energy_uj": 72}}
    )
    save_config(config.to_dict(), path)
    assert load_scenario_config(path) == config


def test_first_load_writes_defaults(tmp_path):
    path = tmp_path / "fresh.json"
    assert load_config(path) == DEFAULTS
    assert json.loads(path.read_text(encoding="utf-8")) == DEFAULTS


def test_missing_keys_are_merged(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text('{"seed": 5}', encoding="utf-8")
    config = load_scenario_config(path)
    assert config.seed == 5 and config.ts_ms == DEFAULTS["ts_ms"]


@pytest.mark.parametrize(
    "changes",
    [
        {"scenario": "teleport"},
        {"iris_ber": 0.7},
        {"cache_size": 0},
        {"repetitions": 0},
        {"ts_ms": -1},
        {"request_code": 7},
        {"power_model": {"transmit": "loud"}},
        {"op_costs": {"hmac": {"time_ms": 46, "energy_uj": 300}}},
        {"power_model": {"transmit": 10.0}},
    ],
)
def test_invalid_values_rejected(changes):
    with pytest.raises(ConfigError):
        ScenarioConfig(**changes)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"baud_rate": 9600})


def test_bad_json_reported(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_replace_ignores_none():
    config = ScenarioConfig().replace(seed=None, iris_ber=0.2)
    assert config.seed == DEFAULTS["seed"] and config.iris_ber == 0.2
