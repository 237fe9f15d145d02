"""Acceptance gates; each test prints exactly one PASS/FAIL line before asserting."""

from __future__ import annotations

import json
import math
import time

import numpy as np
import pytest

from flc import comparison as cmp
from flc.config import parse_config
from flc.dynamics import EventKind, InitialDataSpec, State, StepControl, make_initial_data, step
from flc.estimates import classify_regime
from flc.grid import GridSpec, build_grid
from flc.params import ModelParams
from flc.simulate import run
from flc.sweep import run_sweep, write_atlas
from flc.verify import run_all

MASS_DRIFT_TOL = 1e-10
REFERENCE_RUNTIME_S = 60.0
EQUILIBRIUM_STEPS = 10_000
EQUILIBRIUM_TOL = 1e-12
FACE_ULPS = 8
MARGIN_TOL = 1e-10
ORDER_MIN = 1.8
VERIFY_RUNTIME_S = 120.0
STEADY_Z_TOL = 1e-12
CLOSED_FORM_TOL = 1e-10
WORKED_EXAMPLE_TOL = 1e-12
FLOOR_MIN = 0.99
ATLAS_RUNTIME_S = 600.0
MOSER_TOL = 1e-9


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def reference(root):
    cfg = parse_config(root / "configs" / "reference.json")
    out = {}
    for N in (128, 256):
        start = time.perf_counter()
        res = run(cfg.params, cfg.initial, cfg.control, cfg.T_end, GridSpec(cfg.params.n, cfg.params.R, N),
                  cfg.monitors, cfg.record_interval)
        out[N] = (res, time.perf_counter() - start)
    return out


@pytest.fixture(scope="module")
def verify_rows():
    start = time.perf_counter()
    rows = run_all()
    return {(r.name, r.variant): r for r in rows}, time.perf_counter() - start


def rows_named(rows, name):
    return [r for (n, _), r in rows.items() if n == name]


def test_criterion_01_mass_conservation(reference, report):
    res, elapsed = reference[128]
    masses = np.array([r.mass for r in res.records])
    drift = float(np.max(np.abs(masses - res.mass0)) / res.mass0)
    ok = res.event.kind is EventKind.COMPLETED and drift <= MASS_DRIFT_TOL and elapsed <= REFERENCE_RUNTIME_S
    report(1, ok, f"{res.event.kind.value}, relative mass drift {drift:.2e} (tol {MASS_DRIFT_TOL:g}), "
                  f"runtime {elapsed:.1f} s (limit {REFERENCE_RUNTIME_S:g} s)")


def test_criterion_02_equilibrium(report):
    params = ModelParams(2.0, 1.0, 1.0, 2)
    grid = build_grid(GridSpec(2, 1.0, 32))
    state = State(0.0, make_initial_data(InitialDataSpec("Constant", 1.4), grid))
    control = StepControl()
    for _ in range(EQUILIBRIUM_STEPS):
        state, _ = step(grid, state, params, control)
    dev = float(np.max(np.abs(state.u - 1.4)))
    report(2, dev <= EQUILIBRIUM_TOL, f"{EQUILIBRIUM_STEPS} steps, max deviation {dev:.2e} (tol {EQUILIBRIUM_TOL:g})")


def test_criterion_03_elliptic(verify_rows, report):
    rows, _ = verify_rows
    ulps = rows[("vr_face_N_zero", "ulps")].linf
    margin = rows[("vr_bound_margins", "min/scale")].linf
    orders = [r.order for r in rows_named(rows, "elliptic_compatibility")]
    ok = ulps <= FACE_ULPS and margin >= -MARGIN_TOL and len(orders) == 2 and min(orders) >= ORDER_MIN
    report(3, ok, f"face-N {ulps:.2f} ulps (tol {FACE_ULPS}), min margin/scale {margin:.2e} "
                  f"(tol -{MARGIN_TOL:g}), compatibility orders {[round(o, 3) for o in orders]} (min {ORDER_MIN})")


def test_criterion_04_coefficients(verify_rows, report):
    rows, elapsed = verify_rows
    pq = rows_named(rows, "P_residual") + rows_named(rows, "Q_residual")
    split = rows[("split_identity", "ulps")].linf
    worst = min(r.order for r in pq)
    ok = len(pq) == 8 and worst >= ORDER_MIN and split <= FACE_ULPS and elapsed <= VERIFY_RUNTIME_S
    report(4, ok, f"{len(pq)} P/Q residuals, worst order {worst:.3f} (min {ORDER_MIN}), split identity "
                  f"{split:g} ulps (tol {FACE_ULPS}), verify {elapsed:.1f} s (limit {VERIFY_RUNTIME_S:g} s)")


def test_criterion_05_z_evolution(verify_rows, report):
    rows, _ = verify_rows
    chosen = {}
    for term in ("z_B21_lead", "z_B3_mixed"):
        variants = rows_named(rows, term)
        passing = [r.variant for r in variants if r.order >= ORDER_MIN]
        chosen[term] = passing[0] if len(passing) == 1 else None
    steady = rows[("z_steady_state", "all variants")].linf
    ok = all(chosen.values()) and steady <= STEADY_Z_TOL
    report(5, ok, f"passing readings {chosen}, steady-state residual {steady:.1e} (tol {STEADY_Z_TOL:g})")


def test_criterion_06_closed_forms(verify_rows, report):
    rows, _ = verify_rows
    ric = rows[("riccati_residual", "100 specs x 20 t")].linf
    root = rows[("riccati_root", "|g(t1)|")].linf
    tangent = max(r.linf for r in rows_named(rows, "tangent_residual"))
    control = rows[("riccati_printed_shift", "C3/(2C3) (control)")]
    spec = cmp.RiccatiSpec(1.0, 1.0, 3.0, 2.0, 1.5)
    g0_err = abs(cmp.riccati_g(spec, 0.0) - 1.5)
    t1_err = abs(cmp.riccati_root_time(spec) - math.log(10 / 7))
    ok = (max(ric, root, tangent) <= CLOSED_FORM_TOL and g0_err <= WORKED_EXAMPLE_TOL
          and t1_err <= WORKED_EXAMPLE_TOL and control.status == "XFAIL")
    report(6, ok, f"riccati residual {ric:.1e}, |g(t1)| {root:.1e}, tangent residual {tangent:.1e} "
                  f"(tol {CLOSED_FORM_TOL:g}); worked example errors g(0) {g0_err:.1e}, t1 {t1_err:.1e} "
                  f"(tol {WORKED_EXAMPLE_TOL:g}); printed shift {control.status}")


def test_criterion_07_extinction_floor(reference, report):
    floors = {N: min(r.floor_ratio for r in reference[N][0].records) for N in (128, 256)}
    ok = floors[128] >= FLOOR_MIN and floors[256] >= floors[128]
    report(7, ok, f"floor_ratio_min N=128 {floors[128]!r}, N=256 {floors[256]!r} (min {FLOOR_MIN}, nondecreasing)")


def test_criterion_08_energy_identity(verify_rows, report):
    rows, _ = verify_rows
    m1 = rows[("energy_m1_equals_mass", "bitwise")]
    m3 = rows[("energy_identity", "m=3")]
    ok = m1.status == "PASS" and m3.order >= ORDER_MIN
    report(8, ok, f"m=1 bitwise equal to mass residual: {m1.status == 'PASS'}, m=3 order {m3.order:.3f} "
                  f"(min {ORDER_MIN})")


def test_criterion_09_kernel(verify_rows, report):
    rows, _ = verify_rows
    margin = rows[("kernel_inequality", "1e5 pairs")].linf
    report(9, margin >= 0.0, f"minimum margin over 1e5 pairs {margin:.2e} (must be ≥ 0)")


def test_criterion_10_atlas(root, tmp_path, report):
    sweep = parse_config(root / "configs" / "atlas_sweep.json")
    start = time.perf_counter()
    serial = run_sweep(sweep, 1)
    elapsed = time.perf_counter() - start
    parallel = run_sweep(sweep, 3)
    write_atlas(tmp_path / "j1", serial)
    write_atlas(tmp_path / "j3", parallel)
    identical = (tmp_path / "j1" / "atlas.csv").read_bytes() == (tmp_path / "j3" / "atlas.csv").read_bytes()
    labels_ok = all(r.regime == classify_regime(r.point[0], r.point[1], r.point[3]).value for r in serial)
    bounded = [r for r in serial if r.regime == "GlobalBounded"]
    bounded_ok = bool(bounded) and all(r.outcome == "completed" for r in bounded)
    ok = elapsed <= ATLAS_RUNTIME_S and identical and labels_ok and bounded_ok
    summary = json.dumps({f"p={r.point[0]:g}": f"{r.regime}/{r.outcome}" for r in serial})
    report(10, ok, f"{len(serial)} points in {elapsed:.1f} s (limit {ATLAS_RUNTIME_S:g} s), byte-identical "
                   f"jobs 1 vs 3: {identical}, classifier exact: {labels_ok}, {summary}")


def test_criterion_11_moser(verify_rows, report):
    rows, _ = verify_rows
    err = rows[("moser_root_k40", "|root - b^2 M0|")].linf
    report(11, err <= MOSER_TOL, f"max |mk_root - b^2 M0| at k=40 {err:.2e} (tol {MOSER_TOL:g})")
