"""JSON run and sweep configurations with field-path validation errors."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from .dynamics import InitialDataSpec, InitialKind, StepControl
from .grid import GridSpec
from .params import ModelParams
from .simulate import DiagnosticsConfig


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    initial: InitialDataSpec
    grid: GridSpec
    control: StepControl = StepControl()
    T_end: float = 1.0
    record_interval: float = 1.0
    monitors: DiagnosticsConfig = DiagnosticsConfig()
    output_dir: Optional[str] = None
    seed_label: str = ""


SWEEP_AXES = ("p", "q", "chi", "n", "amplitude")


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    axes: dict = field(default_factory=dict)  # axis name -> tuple of values
    jobs: int = 1

    def points(self) -> list[tuple]:
        """Cartesian product in sorted (p, q, chi, n, amplitude) order."""
        values = [sorted(self.axes.get(a, (self.default(a),))) for a in SWEEP_AXES]
        return list(itertools.product(*values))

    def default(self, axis: str):
        if axis == "amplitude":
            return self.base.initial.amplitude
        return getattr(self.base.params, axis)

    def config_for(self, point: tuple) -> RunConfig:
        p, q, chi, n, amplitude = point
        params = replace(self.base.params, p=p, q=q, chi=chi, n=n)
        return replace(
            self.base,
            params=params,
            initial=replace(self.base.initial, amplitude=amplitude),
            grid=replace(self.base.grid, n=n),
        )


_DEFAULT_MONITORS = DiagnosticsConfig()


def _expect_mapping(obj: Any, path: str, allowed: set[str]) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(path, "must be an object")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")
    return obj


def _number(obj: dict, key: str, path: str, default=None, *, integer=False) -> Any:
    full = f"{path}.{key}" if path else key
    if key not in obj:
        if default is None:
            raise ConfigError(full, "is required")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(full, "must be a finite number")
    if integer:
        if int(v) != v:
            raise ConfigError(full, "must be an integer")
        return int(v)
    return float(v)


def _check(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(path, message)


def parse_run(obj: Any, path: str = "") -> RunConfig:
    def sub(k):
        return f"{path}.{k}" if path else k

    obj = _expect_mapping(
        obj, path,
        {"params", "initial", "grid", "control", "T_end", "record_interval", "monitors", "output_dir", "seed_label"},
    )
    pp = _expect_mapping(obj.get("params"), sub("params"), {"p", "q", "chi", "n", "R"})
    ppath = sub("params")
    p = _number(pp, "p", ppath)
    _check(p >= 1, f"{ppath}.p", "must be ≥ 1")
    q = _number(pp, "q", ppath)
    _check(q >= 1, f"{ppath}.q", "must be ≥ 1")
    chi = _number(pp, "chi", ppath)
    _check(chi > 0, f"{ppath}.chi", "must be > 0")
    n = _number(pp, "n", ppath, integer=True)
    _check(n >= 1, f"{ppath}.n", "must be ≥ 1")
    R = _number(pp, "R", ppath, 1.0)
    _check(R > 0, f"{ppath}.R", "must be > 0")
    params = ModelParams(p, q, chi, n, R)

    ipath = sub("initial")
    ii = _expect_mapping(obj.get("initial"), ipath, {"kind", "base", "amplitude", "width"})
    kind = ii.get("kind")
    kinds = [k.value for k in InitialKind]
    _check(kind in kinds, f"{ipath}.kind", f"must be one of {kinds}")
    base = _number(ii, "base", ipath, 1.0)
    _check(base > 0, f"{ipath}.base", "must be > 0")
    amplitude = _number(ii, "amplitude", ipath, 0.0)
    _check(0 <= amplitude < 1, f"{ipath}.amplitude", "must lie in [0, 1) (positivity of u0)")
    width = _number(ii, "width", ipath, 0.3)
    _check(width > 0, f"{ipath}.width", "must be > 0")
    initial = InitialDataSpec(InitialKind(kind), base, amplitude, width)

    gpath = sub("grid")
    gg = _expect_mapping(obj.get("grid"), gpath, {"N", "n", "R"})
    N = _number(gg, "N", gpath, integer=True)
    _check(N >= 4, f"{gpath}.N", "must be ≥ 4")
    if "n" in gg:
        _check(_number(gg, "n", gpath, integer=True) == n, f"{gpath}.n", "must equal params.n")
    if "R" in gg:
        _check(_number(gg, "R", gpath) == R, f"{gpath}.R", "must equal params.R")
    grid = GridSpec(n, R, N)

    cpath = sub("control")
    cc = _expect_mapping(
        obj.get("control", {}), cpath, {"cfl_diff", "cfl_adv", "dt_min", "dt_max", "blowup_threshold", "tol_bound"}
    )
    d = StepControl()
    vals = {k: _number(cc, k, cpath, getattr(d, k)) for k in ("cfl_diff", "cfl_adv", "dt_min", "dt_max",
                                                                "blowup_threshold", "tol_bound")}
    _check(0 < vals["cfl_diff"] <= 1, f"{cpath}.cfl_diff", "must lie in (0, 1]")
    _check(0 < vals["cfl_adv"] <= 1, f"{cpath}.cfl_adv", "must lie in (0, 1]")
    _check(vals["dt_min"] > 0, f"{cpath}.dt_min", "must be > 0")
    _check(vals["dt_max"] > vals["dt_min"], f"{cpath}.dt_max", "must exceed dt_min")
    _check(vals["blowup_threshold"] > 0, f"{cpath}.blowup_threshold", "must be > 0")
    _check(vals["tol_bound"] >= 0, f"{cpath}.tol_bound", "must be ≥ 0")
    control = StepControl(**vals)

    T_end = _number(obj, "T_end", path)
    _check(T_end > 0, sub("T_end"), "must be > 0")
    rec = _number(obj, "record_interval", path, T_end)
    _check(0 < rec <= T_end, sub("record_interval"), "must lie in (0, T_end]")

    mpath = sub("monitors")
    mm = _expect_mapping(
        obj.get("monitors", {}), mpath, {"mass", "vr_bounds", "floor", "z_plus", "ur_z_ratio", "energy_m"}
    )
    flags = {}
    for k in ("mass", "vr_bounds", "floor", "z_plus", "ur_z_ratio"):
        v = mm.get(k, getattr(_DEFAULT_MONITORS, k))
        _check(isinstance(v, bool), f"{mpath}.{k}", "must be true or false")
        flags[k] = v
    ms = mm.get("energy_m", [])
    _check(isinstance(ms, list), f"{mpath}.energy_m", "must be a list of numbers")
    for i, m in enumerate(ms):
        ok = not isinstance(m, bool) and isinstance(m, (int, float)) and math.isfinite(m) and m >= 1
        _check(ok, f"{mpath}.energy_m[{i}]", "must be a number ≥ 1")
    _check(len(set(ms)) == len(ms), f"{mpath}.energy_m", "entries must be distinct")
    monitors = DiagnosticsConfig(**flags, energy_m=tuple(float(m) for m in ms))

    out = obj.get("output_dir")
    _check(out is None or isinstance(out, str), sub("output_dir"), "must be a string")
    label = obj.get("seed_label", "")
    _check(isinstance(label, str), sub("seed_label"), "must be a string")
    return RunConfig(params, initial, grid, control, T_end, rec, monitors, out, label)


def parse_sweep(obj: Any) -> SweepConfig:
    obj = _expect_mapping(obj, "", {"base", "sweep", "jobs"})
    _check("base" in obj, "base", "is required")
    base = parse_run(obj["base"], "base")
    axes_obj = _expect_mapping(obj.get("sweep"), "sweep", set(SWEEP_AXES))
    axes = {}
    for axis, values in axes_obj.items():
        path = f"sweep.{axis}"
        _check(isinstance(values, list) and len(values) > 0, path, "must be a nonempty list")
        for i, v in enumerate(values):
            ok = not isinstance(v, bool) and isinstance(v, (int, float)) and math.isfinite(v)
            _check(ok, f"{path}[{i}]", "must be a finite number")
        _check(len(set(values)) == len(values), path, "entries must be distinct")
        axes[axis] = tuple(int(v) if axis == "n" else float(v) for v in values)
    jobs = obj.get("jobs", 1)
    _check(isinstance(jobs, int) and not isinstance(jobs, bool) and jobs >= 1, "jobs", "must be a positive integer")
    sweep = SweepConfig(base, axes, jobs)
    # Validate every point eagerly so a bad axis value fails before any run.
    for point in sweep.points():
        p, q, chi, n, amplitude = point
        _check(p >= 1, "sweep.p", f"value {p} must be ≥ 1")
        _check(q >= 1, "sweep.q", f"value {q} must be ≥ 1")
        _check(chi > 0, "sweep.chi", f"value {chi} must be > 0")
        _check(n >= 1, "sweep.n", f"value {n} must be ≥ 1")
        _check(0 <= amplitude < 1, "sweep.amplitude", f"value {amplitude} must lie in [0, 1)")
    return sweep


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def parse_config(path: str | Path) -> RunConfig | SweepConfig:
    obj = load_json(path)
    if isinstance(obj, dict) and "sweep" in obj:
        return parse_sweep(obj)
    return parse_run(obj)
