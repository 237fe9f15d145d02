"""Run driver: integrates to T_end with the compiled loop and records diagnostics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .dynamics import (
    EventKind,
    EventReport,
    InitialDataSpec,
    State,
    StepControl,
    make_initial_data,
    rhs_expanded,
)
from .elliptic import EllipticFields, check_vr_bounds, compute_mu, solve_gradient
from .estimates import kappa, lm_norm
from .grid import GridSpec, RadialGrid, build_grid, cell_integral, derivative_field
from .params import ModelParams

log = logging.getLogger(__name__)

_HISTORY_CHUNK = 1 << 16


@dataclass(frozen=True)
class DiagnosticsConfig:
    mass: bool = True
    vr_bounds: bool = True
    floor: bool = True
    z_plus: bool = True
    ur_z_ratio: bool = True
    energy_m: tuple[float, ...] = ()

    def __post_init__(self):
        ms = tuple(sorted(float(m) for m in self.energy_m))
        if any(m < 1 for m in ms):
            raise ValueError(f"energy_m entries must be >= 1, got {ms}")
        if len(set(ms)) != len(ms):
            raise ValueError(f"energy_m entries must be distinct, got {ms}")
        object.__setattr__(self, "energy_m", ms)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    dt: float
    mass: float
    mu: float
    min_u: float
    max_u: float
    max_abs_ur: float
    max_z_plus: float
    floor_ratio: float
    vr_margin_min: float
    ur_over_1_plus_zplus: float
    lm_norms: dict = field(default_factory=dict)
    event_flag: str = "ok"


@dataclass(frozen=True, eq=False)
class StepHistory:
    """Per accepted step: time, min u, max u (index 0 is the initial state)."""

    t: np.ndarray
    min_u: np.ndarray
    max_u: np.ndarray

    @property
    def steps(self) -> int:
        return self.t.size - 1


@dataclass(frozen=True, eq=False)
class RunResult:
    grid: RadialGrid
    records: list
    final_state: State
    event: EventReport
    history: StepHistory
    inf_u0: float
    mu0: float
    mass0: float

    @property
    def sup_u(self) -> float:
        return float(self.history.max_u.max())


RecordHook = Callable[[State, EllipticFields, DiagnosticsRecord], None]


def record_times(T_end: float, record_interval: float) -> list[float]:
    """0, dt_rec, 2 dt_rec, ... strictly below T_end, then T_end; products, not sums."""
    if not (T_end > 0 and 0 < record_interval <= T_end):
        raise ValueError(f"need 0 < record_interval <= T_end, got {record_interval}, {T_end}")
    times = [0.0]
    k = 1
    while k * record_interval < T_end * (1 - 1e-12):
        times.append(k * record_interval)
        k += 1
    times.append(float(T_end))
    return times


def diagnose(
    grid: RadialGrid,
    state: State,
    params: ModelParams,
    diag: DiagnosticsConfig,
    *,
    dt: float,
    inf_u0: float,
    mu0: float,
    sup_so_far: float,
    tol_bound: float,
    event_flag: str = "ok",
) -> tuple[DiagnosticsRecord, EllipticFields, bool]:
    """One diagnostics row; also returns the elliptic fields and whether v bounds hold."""
    u = state.u
    ef = solve_gradient(grid, u)
    nan = math.nan
    mass = cell_integral(grid, u) if diag.mass else nan
    u_r = derivative_field(grid, u, 1, boundary="neumann")[0]
    max_abs_ur = float(np.abs(u_r).max())
    z_plus = None
    if diag.z_plus or diag.ur_z_ratio:
        z = rhs_expanded(grid, u, ef, params, u_r=u_r) / u
        z_plus = np.maximum(z, 0.0)
    max_z_plus = float(z_plus.max()) if diag.z_plus else nan
    ratio = float(np.max(np.abs(u_r) / (1.0 + z_plus))) if diag.ur_z_ratio else nan
    floor_ratio = nan
    if diag.floor:
        k = kappa(params.chi, mu0, sup_so_far, params.q)
        floor_ratio = float(u.min() / (inf_u0 * math.exp(-k * state.t)))
    margin, bounds_ok = nan, True
    if diag.vr_bounds:
        report = check_vr_bounds(grid, u, ef, float(u.max()), tol_bound)
        margin, bounds_ok = report.min_margin, report.all_satisfied
    norms = {m: lm_norm(grid, u, m) for m in diag.energy_m}
    rec = DiagnosticsRecord(
        t=float(state.t),
        dt=float(dt),
        mass=mass,
        mu=compute_mu(grid, u),
        min_u=float(u.min()),
        max_u=float(u.max()),
        max_abs_ur=max_abs_ur,
        max_z_plus=max_z_plus,
        floor_ratio=floor_ratio,
        vr_margin_min=margin,
        ur_over_1_plus_zplus=ratio,
        lm_norms=norms,
        event_flag=event_flag,
    )
    return rec, ef, bounds_ok


def run(
    params: ModelParams,
    initial: InitialDataSpec,
    control: StepControl,
    T_end: float,
    grid_spec: GridSpec | int,
    diag: Optional[DiagnosticsConfig] = None,
    record_interval: Optional[float] = None,
    on_record: Optional[RecordHook] = None,
    u0: Optional[np.ndarray] = None,
) -> RunResult:
    """Integrate from the initial data to T_end or the first event.

    One row is recorded at t = 0, at every multiple of ``record_interval``
    and at the final time. Steps are clipped to land on record times.
    ``u0`` overrides the initial family (used for manufactured tests).
    """
    if diag is None:
        diag = DiagnosticsConfig()
    if isinstance(grid_spec, int):
        grid_spec = GridSpec(params.n, params.R, grid_spec)
    if grid_spec.n != params.n or grid_spec.R != params.R:
        raise ValueError("grid (n, R) must match the model parameters")
    if record_interval is None:
        record_interval = T_end
    times = record_times(T_end, record_interval)
    grid = build_grid(grid_spec)
    u = make_initial_data(initial, grid) if u0 is None else np.array(u0, dtype=np.float64)
    state = State(0.0, u.copy())
    inf_u0 = float(u.min())
    mu0 = compute_mu(grid, u)
    mass0 = cell_integral(grid, u)
    fpow = grid.face_radii ** (grid.n - 1)

    hist_t, hist_min, hist_max = [np.array([0.0])], [np.array([u.min()])], [np.array([u.max()])]
    sup_so_far = float(u.max())
    records: list[DiagnosticsRecord] = []

    def emit(st: State, dt: float, flag: str) -> bool:
        rec, ef, ok = diagnose(
            grid, st, params, diag, dt=dt, inf_u0=inf_u0, mu0=mu0,
            sup_so_far=sup_so_far, tol_bound=control.tol_bound, event_flag=flag,
        )
        records.append(rec)
        if on_record is not None:
            on_record(st, ef, rec)
        return ok

    def finish(kind: EventKind, t_event: float, detail: str, st: State, dt: float) -> RunResult:
        # Completed and BoundViolation end on a row that was just emitted; the
        # other events get a row of their own at the last accepted state.
        event = EventReport(kind, t_event, detail)
        if kind in (EventKind.COMPLETED, EventKind.BOUND_VIOLATION):
            records[-1] = replace(records[-1], event_flag=kind.value)
        else:
            emit(st, dt, kind.value)
        history = StepHistory(np.concatenate(hist_t), np.concatenate(hist_min), np.concatenate(hist_max))
        log.info("run finished: %s at t=%r after %d steps", kind.value, t_event, history.steps)
        return RunResult(grid, records, st, event, history, inf_u0, mu0, mass0)

    if u.max() > control.blowup_threshold:
        return finish(EventKind.BLOW_UP, 0.0, f"max u0 = {u.max()!r} exceeds threshold", state, 0.0)
    if not emit(state, 0.0, "ok"):
        return finish(EventKind.BOUND_VIOLATION, 0.0, "v_r/v_rr bound margin below tolerance", state, 0.0)

    t = 0.0
    last_dt = 0.0
    buf_t = np.empty(_HISTORY_CHUNK)
    buf_min = np.empty(_HISTORY_CHUNK)
    buf_max = np.empty(_HISTORY_CHUNK)
    for t_rec in times[1:]:
        while True:
            status, t_new, steps, dt_out, bad = _kernels.advance(
                u, t, t_rec, grid.h, grid.volume_weights, grid.face_measure, fpow,
                float(params.p), float(params.q), float(params.chi),
                control.cfl_diff, control.cfl_adv, control.dt_min, control.dt_max,
                control.blowup_threshold, buf_t, buf_min, buf_max,
            )
            if steps:
                hist_t.append(buf_t[:steps].copy())
                hist_min.append(buf_min[:steps].copy())
                hist_max.append(buf_max[:steps].copy())
                sup_so_far = max(sup_so_far, float(buf_max[:steps].max()))
                last_dt = dt_out
            t = t_new
            if status != _kernels.BUFFER_FULL:
                break
        # The kernel leaves u at the last accepted (positive) state.
        state = State(t, u.copy())
        if status == _kernels.BLOW_UP:
            return finish(EventKind.BLOW_UP, t, f"max u = {u.max()!r} > {control.blowup_threshold!r}", state, last_dt)
        if status == _kernels.DT_UNDERFLOW:
            return finish(EventKind.DT_UNDERFLOW, t, f"dt = {dt_out!r} < dt_min", state, last_dt)
        if status == _kernels.POSITIVITY_LOSS:
            detail = f"cell {bad} became nonpositive in a step of size {dt_out!r}"
            return finish(EventKind.POSITIVITY_LOSS, t + dt_out, detail, state, last_dt)
        if not emit(state, last_dt, "ok"):
            return finish(EventKind.BOUND_VIOLATION, t, "v_r/v_rr bound margin below tolerance", state, last_dt)
    return finish(EventKind.COMPLETED, t, "", state, last_dt)
