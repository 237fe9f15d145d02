from __future__ import annotations

import numpy as np
import pytest

from flc.dynamics import EventKind, InitialDataSpec, StepControl
from flc.outputs import write_diagnostics_csv
from flc.params import ModelParams
from flc.simulate import DiagnosticsConfig, record_times, run

REF = ModelParams(2.0, 1.0, 1.0, 2)
BUMP = InitialDataSpec("CosineBump", 1.0, 0.5)
AGGREGATING = ModelParams(1.0, 1.0, 20.0, 2)


def test_record_times_are_products():
    ts = record_times(1.0, 0.1)
    assert ts[0] == 0.0 and ts[-1] == 1.0 and len(ts) == 11
    assert ts[3] == 3 * 0.1
    assert record_times(1.0, 0.3) == [0.0, 0.3, 0.6, 0.8999999999999999, 1.0]
    with pytest.raises(ValueError):
        record_times(1.0, 2.0)


@pytest.mark.parametrize("params", [REF, ModelParams(1.0, 1.0, 1.0, 3), ModelParams(3.0, 2.0, 2.5, 1)])
def test_constant_data_is_preserved(params):
    res = run(params, InitialDataSpec("Constant", 1.4), StepControl(), 1.0, 32, record_interval=0.25)
    assert res.event.kind is EventKind.COMPLETED
    assert np.max(np.abs(res.final_state.u - 1.4)) <= 1e-12
    assert all(abs(r.max_u - r.mu) <= 1e-12 and abs(r.min_u - r.mu) <= 1e-12 for r in res.records)


def test_bump_run_rows_and_invariants():
    diag = DiagnosticsConfig(energy_m=(3.0, 2.0))
    res = run(REF, BUMP, StepControl(), 0.5, 48, diag, 0.1)
    assert res.event.kind is EventKind.COMPLETED
    assert [r.t for r in res.records] == record_times(0.5, 0.1)
    assert [r.event_flag for r in res.records] == ["ok"] * 5 + ["Completed"]
    m0 = res.records[0].mass
    for r in res.records:
        assert r.min_u > 0
        assert abs(r.mass - m0) <= 1e-10 * m0
        assert r.vr_margin_min >= -1e-10
        assert set(r.lm_norms) == {2.0, 3.0}
        assert np.isfinite(r.max_z_plus) and r.floor_ratio >= 0.99
    assert res.history.t[0] == 0.0 and res.history.steps == len(res.history.t) - 1
    assert res.sup_u == pytest.approx(1.5, abs=1e-3)


def test_monitors_can_be_disabled():
    diag = DiagnosticsConfig(mass=False, vr_bounds=False, floor=False, z_plus=False, ur_z_ratio=False)
    res = run(REF, BUMP, StepControl(), 0.05, 16, diag)
    r = res.records[-1]
    assert np.isnan(r.mass) and np.isnan(r.vr_margin_min) and np.isnan(r.floor_ratio)
    assert np.isnan(r.max_z_plus) and np.isnan(r.ur_over_1_plus_zplus)


def test_runs_are_deterministic(tmp_path):
    paths = []
    for i in range(2):
        res = run(REF, BUMP, StepControl(), 0.2, 32, DiagnosticsConfig(energy_m=(2.0,)), 0.05)
        p = tmp_path / f"d{i}.csv"
        write_diagnostics_csv(p, res.records, (2.0,))
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_blowup_at_start_when_threshold_below_max():
    res = run(REF, BUMP, StepControl(blowup_threshold=1.2), 1.0, 32)
    assert res.event.kind is EventKind.BLOW_UP and res.event.t_event == 0.0
    assert len(res.records) == 1 and res.records[0].event_flag == "BlowUp"


def test_blowup_when_threshold_equals_max_and_u_grows():
    probe = run(AGGREGATING, BUMP, StepControl(), 1e-9, 32)
    u0_max = probe.records[0].max_u
    res = run(AGGREGATING, BUMP, StepControl(blowup_threshold=u0_max), 0.5, 32)
    assert res.event.kind is EventKind.BLOW_UP and 0.0 < res.event.t_event < 0.01


def test_dt_underflow_event():
    res = run(REF, BUMP, StepControl(dt_min=5e-3), 1.0, 64)
    assert res.event.kind is EventKind.DT_UNDERFLOW
    assert res.records[-1].event_flag == "DtUnderflow"


def test_positivity_loss_event_keeps_last_good_state():
    res = run(AGGREGATING, InitialDataSpec("CosineBump", 1.0, 0.9), StepControl(), 0.5, 32, record_interval=0.01)
    assert res.event.kind is EventKind.POSITIVITY_LOSS
    assert res.records[-1].event_flag == "PositivityLoss"
    assert np.all(res.final_state.u > 0)
    assert res.event.t_event > res.final_state.t


def test_grid_mismatch_rejected():
    from flc.grid import GridSpec
    with pytest.raises(ValueError):
        run(REF, BUMP, StepControl(), 0.1, GridSpec(3, 1.0, 16))
