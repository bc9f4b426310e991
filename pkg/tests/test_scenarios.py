import pytest

from config import SCENARIO_NAMES
from scenarios import ALL_SCENARIOS, SCENARIO_MAP, get_scenario


def test_registry_covers_every_config_name():
    assert [s.name for s in ALL_SCENARIOS] == list(SCENARIO_NAMES)
    assert get_scenario("Replay_Attack") is SCENARIO_MAP["replay_attack"]
    assert get_scenario("nope") is None


def test_every_scenario_states_a_claim():
    for scenario in ALL_SCENARIOS:
        assert scenario.claim
        assert scenario.expected


@pytest.mark.parametrize("name", SCENARIO_NAMES)
@pytest.mark.parametrize("seed", [1, 2])
def test_scenario_matches_expected_verdicts(config, name, seed):
    result = get_scenario(name).run(config.replace(scenario=name), seed)
    assert result.problems == []
    assert result.passed
    assert len(result.verdicts) == len(get_scenario(name).expected)


def test_normal_scenario_energy(config):
    result = get_scenario("normal").run(config, 1)
    assert result.sessions == 1
    assert result.counts == {
        "generator_runs": 1,
        "hmac_ops": 4,
        "sha_ops": 3,
        "bits_received": 320,
        "bits_sent": 608,
    }


def test_scenario_run_is_reproducible(config):
    scenario = get_scenario("tamper_attack")
    assert scenario.run(config, 9).trace_jsonl == scenario.run(config, 9).trace_jsonl


def test_replay_never_opens_second_session(config):
    result = get_scenario("replay_attack").run(config, 5)
    assert result.sessions == 1
    assert '"note": "replay #2"' in result.trace_jsonl


def test_stolen_card_ends_with_destroyed_key(config):
    result = get_scenario("stolen_card").run(config, 4)
    assert result.passed
    assert result.verdicts[1] == f"rejected:bad_reset_response k={config.cache_size + 1}"
    assert result.verdicts[-1] == "rejected:key_destroyed"


def test_emergent_with_lookalike_iris_fails(config):
    result = get_scenario("emergent").run(config.replace(iris_ber=0.35), 1)
    assert not result.passed
    assert result.sessions == 0
    assert result.verdicts[0].startswith("rejected:")


def test_smaller_cache_changes_recovery_length(config):
    result = get_scenario("recovery").run(config.replace(cache_size=2), 3)
    assert result.passed
    assert result.trace_jsonl.count('"kind": "ResetChallenge", "note": "deliver') == 4


@pytest.mark.slow
@pytest.mark.parametrize(
    "name", ["replay_attack", "tamper_attack", "desync", "impersonation", "stolen_card"]
)
def test_attack_sweep(config, name):
    scenario = get_scenario(name)
    failures = [seed for seed in range(1000) if not scenario.run(config, seed).passed]
    assert failures == []


# Unlock rates measured over 1000 seeded trials.
EMERGENT_BASELINES = [(0.05, 1.000), (0.10, 1.000), (0.35, 0.001)]


@pytest.mark.slow
@pytest.mark.parametrize("ber,baseline", EMERGENT_BASELINES)
def test_emergent_success_rate_matches_baseline(config, ber, baseline):
    scenario = get_scenario("emergent")
    noisy = config.replace(iris_ber=ber)
    rate = sum(scenario.run(noisy, seed).sessions for seed in range(1000)) / 1000
    assert abs(rate - baseline) <= 0.02
