from __future__ import annotations

import csv
import json

import pytest

import flc.simulate
from flc.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from flc.elliptic import BoundReport

BASE = {
    "params": {"p": 2, "q": 1, "chi": 1, "n": 2},
    "initial": {"kind": "CosineBump", "amplitude": 0.5},
    "grid": {"N": 16},
    "T_end": 0.1,
    "record_interval": 0.05,
}


def write_config(tmp_path, **overrides):
    obj = json.loads(json.dumps(BASE))
    for section, value in overrides.items():
        if isinstance(value, dict):
            obj.setdefault(section, {}).update(value)
        else:
            obj[section] = value
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(obj))
    return str(path)


def simulate(tmp_path, **overrides):
    return main(["simulate", "--config", write_config(tmp_path, **overrides), "--out", str(tmp_path / "out")])


def test_completed_writes_outputs(tmp_path, capsys):
    assert simulate(tmp_path) == EXIT_OK
    assert capsys.readouterr().out.startswith("Completed at t=")
    rows = list(csv.DictReader((tmp_path / "out" / "diagnostics.csv").open()))
    snaps = sorted((tmp_path / "out" / "snapshots").glob("snap_*.json"))
    assert len(rows) == len(snaps) == 3
    assert json.loads(snaps[-1].read_text())["t"] == float(rows[-1]["t"])


def test_blowup_exit_code(tmp_path):
    assert simulate(tmp_path, control={"blowup_threshold": 1.2}) == EXIT_BLOWUP


def test_dt_underflow_exit_code(tmp_path):
    assert simulate(tmp_path, grid={"N": 64}, control={"dt_min": 5e-3}) == EXIT_FAILURE


def test_positivity_loss_exit_code(tmp_path, capsys):
    code = simulate(tmp_path, params={"p": 1, "q": 1, "chi": 20, "n": 2},
                    initial={"kind": "CosineBump", "amplitude": 0.9}, grid={"N": 32}, T_end=1.0)
    assert code == EXIT_FAILURE
    assert capsys.readouterr().out.startswith("PositivityLoss")


def test_bound_violation_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(flc.simulate, "check_vr_bounds",
                        lambda *a, **k: BoundReport(-1.0, 0.0, 0.0, 0.0, False))
    assert simulate(tmp_path) == EXIT_FAILURE
    assert capsys.readouterr().out.startswith("BoundViolation")


def test_config_errors(tmp_path, capsys):
    assert simulate(tmp_path, params={"p": 0.5}) == EXIT_CONFIG
    assert "config error: params.p: must be ≥ 1" in capsys.readouterr().err
    missing = ["simulate", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]
    assert main(missing) == EXIT_CONFIG
    assert main(["classify", "--p", "0.5", "--q", "1", "--n", "2"]) == EXIT_CONFIG


def test_sweep_command(tmp_path, capsys):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"base": BASE, "sweep": {"p": [1.0, 2.0]}}))
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "atlas")]) == EXIT_OK
    assert capsys.readouterr().out.startswith("2 points: completed 2")
    assert main(["sweep", "--config", write_config(tmp_path), "--out", str(tmp_path)]) == EXIT_CONFIG


@pytest.mark.parametrize("p,expected", [
    ("1", "BlowUpKnown (threshold 1.5)"),
    ("1.5", "Open (threshold 1.5)"),
    ("2", "GlobalBounded (threshold 1.5)"),
])
def test_classify_output(p, expected, capsys):
    assert main(["classify", "--p", p, "--q", "1", "--n", "2"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == expected
