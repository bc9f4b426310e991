import json

import pytest

from app import main


def test_normal_run_writes_energy_report(tmp_path, capsys):
    report_path = tmp_path / "energy.json"
    trace_path = tmp_path / "trace.jsonl"
    code = main([
        "run", "--scenario", "normal", "--seed", "1",
        "--energy-report", str(report_path), "--trace", str(trace_path),
    ])
    assert code == 0
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["totals"] == {"energy_uJ": 5306.2, "time_ms": 343.0}
    lines = trace_path.read_text(encoding="utf-8").splitlines()
    assert all(json.loads(line)["time"] >= 0 for line in lines)
    assert "1/1 runs matched" in capsys.readouterr().out


def test_attack_correctly_rejected_exits_zero():
    assert main(["run", "--scenario", "replay_attack"]) == 0


def test_outputs_are_byte_identical(tmp_path):
    outputs = []
    for run in ("a", "b"):
        trace = tmp_path / f"{run}.jsonl"
        report = tmp_path / f"{run}.json"
        main(["run", "--scenario", "desync", "--seed", "3", "--repetitions", "2",
              "--trace", str(trace), "--energy-report", str(report)])
        outputs.append((trace.read_bytes(), report.read_bytes()))
    assert outputs[0] == outputs[1]


def test_parallel_repetitions_merge_in_order(tmp_path):
    serial, parallel = tmp_path / "serial.jsonl", tmp_path / "parallel.jsonl"
    args = ["run", "--scenario", "normal", "--repetitions", "3"]
    assert main([*args, "--trace", str(serial)]) == 0
    assert main([*args, "--trace", str(parallel), "--jobs", "2"]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_lookalike_iris_reports_low_success_rate(capsys):
    code = main(["run", "--scenario", "emergent", "--iris-ber", "0.35", "--repetitions", "10"])
    assert code == 1
    assert "success rate: 0.000 (0/10" in capsys.readouterr().out


def test_unknown_scenario_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["run", "--scenario", "teleport"])
    assert info.value.code == 2


def test_bad_config_file_exits_two(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"cache_size": 0}', encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 2


def test_config_file_selects_scenario(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"scenario": "impersonation", "pbkdf2_iterations": 10}), encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 0
    assert capsys.readouterr().out.startswith("impersonation:")


def test_list_names_every_scenario(capsys):
    assert main(["run", "--list"]) == 0
    out = capsys.readouterr().out
    for name in ("normal", "emergent", "recovery", "stolen_card"):
        assert name in out
