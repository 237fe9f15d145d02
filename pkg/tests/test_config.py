from __future__ import annotations

import copy
import json

import pytest

from flc.config import ConfigError, RunConfig, SweepConfig, load_json, parse_config, parse_run, parse_sweep

MINIMAL = {
    "params": {"p": 2, "q": 1, "chi": 1, "n": 2},
    "initial": {"kind": "CosineBump", "amplitude": 0.5},
    "grid": {"N": 32},
    "T_end": 1.0,
}


def with_change(path: str, value):
    obj = copy.deepcopy(MINIMAL)
    *parents, key = path.split(".")
    node = obj
    for part in parents:
        node = node.setdefault(part, {})
    node[key] = value
    return obj


def test_minimal_config_fills_defaults():
    cfg = parse_run(MINIMAL)
    assert isinstance(cfg, RunConfig)
    assert cfg.control.cfl_diff == 0.4 and cfg.control.cfl_adv == 0.5
    assert cfg.control.blowup_threshold == 1e6
    assert cfg.record_interval == 1.0 and cfg.params.R == 1.0
    assert cfg.grid.n == 2 and cfg.grid.N == 32
    assert cfg.monitors.mass and cfg.monitors.energy_m == ()


@pytest.mark.parametrize("path,value,message", [
    ("params.p", 0.5, "params.p: must be ≥ 1"),
    ("initial.amplitude", 1.0, "initial.amplitude: must lie in [0, 1)"),
    ("params.chi", 0, "params.chi: must be > 0"),
    ("params.n", 2.5, "params.n: must be an integer"),
    ("grid.N", 3, "grid.N: must be ≥ 4"),
    ("grid.n", 3, "grid.n: must equal params.n"),
    ("T_end", -1, "T_end: must be > 0"),
    ("record_interval", 2.0, "record_interval: must lie in (0, T_end]"),
    ("control.cfl_diff", 0, "control.cfl_diff: must lie in (0, 1]"),
    ("monitors.energy_m", [0.5], "monitors.energy_m[0]: must be a number ≥ 1"),
    ("monitors.mass", "yes", "monitors.mass: must be true or false"),
    ("initial.kind", "Triangle", "initial.kind: must be one of"),
    ("params.extra", 1, "params.extra: unknown key"),
    ("params.q", True, "params.q: must be a finite number"),
])
def test_field_path_errors(path, value, message):
    with pytest.raises(ConfigError) as exc:
        parse_run(with_change(path, value))
    assert str(exc.value).startswith(message)


def test_missing_sections():
    obj = copy.deepcopy(MINIMAL)
    del obj["params"]["q"]
    with pytest.raises(ConfigError, match=r"^params\.q: is required"):
        parse_run(obj)
    with pytest.raises(ConfigError, match=r"^params: must be an object"):
        parse_run({k: v for k, v in MINIMAL.items() if k != "params"})


def sweep_obj(**axes):
    return {"base": MINIMAL, "sweep": axes or {"p": [2.0, 1.0, 1.5]}, "jobs": 2}


def test_sweep_points_sorted_product():
    sw = parse_sweep(sweep_obj(p=[2.0, 1.0], amplitude=[0.3, 0.1]))
    assert isinstance(sw, SweepConfig) and sw.jobs == 2
    assert sw.points() == [(1.0, 1.0, 1.0, 2, 0.1), (1.0, 1.0, 1.0, 2, 0.3),
                           (2.0, 1.0, 1.0, 2, 0.1), (2.0, 1.0, 1.0, 2, 0.3)]
    cfg = sw.config_for((1.0, 1.0, 1.0, 3, 0.1))
    assert cfg.params.n == 3 and cfg.grid.n == 3 and cfg.initial.amplitude == 0.1


@pytest.mark.parametrize("obj,message", [
    (sweep_obj(p=[0.5]), "sweep.p: value 0.5 must be ≥ 1"),
    (sweep_obj(p=[]), "sweep.p: must be a nonempty list"),
    (sweep_obj(w=[1.0]), "sweep.w: unknown key"),
    ({"base": MINIMAL, "sweep": {"p": [1.0]}, "jobs": 0}, "jobs: must be a positive integer"),
    ({"sweep": {"p": [1.0]}}, "base: is required"),
])
def test_sweep_errors(obj, message):
    with pytest.raises(ConfigError) as exc:
        parse_sweep(obj)
    assert str(exc.value).startswith(message)


def test_parse_config_dispatch_and_file_errors(tmp_path):
    run_file = tmp_path / "run.json"
    run_file.write_text(json.dumps(MINIMAL))
    assert isinstance(parse_config(run_file), RunConfig)
    sweep_file = tmp_path / "sweep.json"
    sweep_file.write_text(json.dumps(sweep_obj()))
    assert isinstance(parse_config(sweep_file), SweepConfig)
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_json(bad)
    with pytest.raises(ConfigError, match="cannot read file"):
        load_json(tmp_path / "missing.json")


def test_shipped_configs_parse(root):
    assert isinstance(parse_config(root / "configs" / "reference.json"), RunConfig)
    sweep = parse_config(root / "configs" / "atlas_sweep.json")
    assert [pt[0] for pt in sweep.points()] == [1.0, 1.25, 1.5, 1.75, 2.0]
