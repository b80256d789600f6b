import json

import pytest

from affinesv.cli import main
from affinesv.presets import PRESET_NAMES


def test_example_then_validate(tmp_path):
    out = str(tmp_path)
    assert main(["example", "yule", "--out-dir", out]) == 0
    cfg = tmp_path / "yule.json"
    assert cfg.exists()
    json.loads(cfg.read_text())
    assert main(["validate", str(cfg), "--out-dir", out]) == 0
    report = json.loads((tmp_path / "yule.validate.json").read_text())
    assert report["ok"] is True


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_validate_all_shipped(tmp_path, name):
    assert main(["validate", name, "--out-dir", str(tmp_path)]) == 0


def test_riccati_writes_tables(tmp_path):
    out = str(tmp_path)
    assert main(["riccati", "yule", "--dt", "0.01", "--out-dir", out, "--format", "csv"]) == 0
    files = sorted(p.name for p in tmp_path.glob("yule-q*.riccati.csv"))
    assert files == ["yule-q0.riccati.csv", "yule-q1.riccati.csv"]
    header = (tmp_path / "yule-q0.riccati.csv").read_text().splitlines()[0]
    assert header.startswith("t,phi")


def test_simulate_writes_summary(tmp_path):
    out = str(tmp_path)
    assert main(["simulate", "yule", "--paths", "50", "--out-dir", out]) == 0
    summary = json.loads((tmp_path / "yule-11.summary.json").read_text())
    assert summary["n_paths"] == 50


def test_verify_report_naming_and_seed_override(tmp_path):
    out = str(tmp_path)
    assert main(["verify", "yule", "--paths", "400", "--out-dir", out]) == 0
    assert (tmp_path / "yule-11.report.json").exists()
    assert main(["verify", "yule", "--paths", "400", "--seed", "99", "--out-dir", out]) == 0
    rep = json.loads((tmp_path / "yule-99.report.json").read_text())
    assert rep["seed"] == 99
    assert rep["pass"] is True
    assert rep["queries"][0]["pass"] is True


def test_verify_runs_are_byte_identical(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "yule", "--paths", "300", "--out-dir", str(d1)]) == 0
    assert main(["verify", "yule", "--paths", "300", "--out-dir", str(d2)]) == 0
    b1 = (d1 / "yule-11.report.json").read_bytes()
    b2 = (d2 / "yule-11.report.json").read_bytes()
    assert b1 == b2


def test_usage_errors_exit_two(tmp_path):
    out = str(tmp_path)
    assert main(["validate", str(tmp_path / "missing.json"), "--out-dir", out]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": ')
    assert main(["validate", str(bad), "--out-dir", out]) == 2
    assert main(["example", "not-a-scenario", "--out-dir", out]) == 2
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_indefinite_query_rejected(tmp_path):
    assert main(["example", "yule", "--out-dir", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "yule.json").read_text())
    obj["queries"][0]["u2"] = [[1.0, 0.0], [0.0, -1.0]]
    bad = tmp_path / "badq.json"
    bad.write_text(json.dumps(obj))
    assert main(["riccati", str(bad), "--out-dir", str(tmp_path)]) == 2


def test_inadmissible_scenario_fails_validation(tmp_path):
    obj = json.loads(json.dumps(__import__("affinesv.presets", fromlist=["preset"]).preset("yule")))
    # drift too small to carry the truncation term of a heavy small atom
    obj["params"]["jumps"]["m_atoms"] = [
        {"xi": [[0.5, 0.0], [0.0, 0.0]], "mass": 3.0}
    ]
    obj["params"]["b"] = [[0.01, 0.0], [0.0, 0.01]]
    cfg = tmp_path / "inadmissible.json"
    cfg.write_text(json.dumps(obj))
    assert main(["validate", str(cfg), "--out-dir", str(tmp_path)]) == 1
    assert main(["verify", str(cfg), "--out-dir", str(tmp_path)]) == 1
    seed = obj["sim"]["seed"]
    rep = json.loads((tmp_path / f"{obj['name']}-{seed}.report.json").read_text())
    assert rep["pass"] is False
