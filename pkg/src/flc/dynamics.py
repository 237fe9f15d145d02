"""Conservative finite-volume dynamics for u, its expanded-form cross-check, and Heun stepping.

These are the readable numpy reference versions. The long-running time loop
in :mod:`flc.simulate` uses the compiled kernels in :mod:`flc._kernels`,
which perform the same arithmetic and are tested against this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .elliptic import EllipticFields, solve_gradient
from .errors import NonPositiveFieldError, require_positive
from .grid import RadialGrid, _check_cells, derivative_field
from .params import ModelParams


@dataclass(frozen=True, eq=False)
class State:
    t: float
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.u)):
            raise ValueError("state contains non-finite values")
        require_positive(self.u)


@dataclass(frozen=True)
class StepControl:
    cfl_diff: float = 0.4
    cfl_adv: float = 0.5
    dt_min: float = 1e-12
    dt_max: float = 1e-2
    blowup_threshold: float = 1e6
    tol_bound: float = 1e-10

    def __post_init__(self):
        if not 0 < self.cfl_diff <= 1:
            raise ValueError(f"cfl_diff must lie in (0, 1], got {self.cfl_diff}")
        if not 0 < self.cfl_adv <= 1:
            raise ValueError(f"cfl_adv must lie in (0, 1], got {self.cfl_adv}")
        if not 0 < self.dt_min < self.dt_max:
            raise ValueError(f"need 0 < dt_min < dt_max, got {self.dt_min}, {self.dt_max}")
        if not self.blowup_threshold > 0:
            raise ValueError(f"blowup_threshold must be > 0, got {self.blowup_threshold}")
        if not self.tol_bound >= 0:
            raise ValueError(f"tol_bound must be >= 0, got {self.tol_bound}")


class EventKind(str, enum.Enum):
    COMPLETED = "Completed"
    BLOW_UP = "BlowUp"
    DT_UNDERFLOW = "DtUnderflow"
    POSITIVITY_LOSS = "PositivityLoss"
    BOUND_VIOLATION = "BoundViolation"


@dataclass(frozen=True)
class EventReport:
    kind: EventKind
    t_event: float
    detail: str = ""


class StepError(RuntimeError):
    """Raised by :func:`step` when the step cannot be taken; carries the event."""

    def __init__(self, report: EventReport):
        super().__init__(f"{report.kind.value} at t={report.t_event!r}: {report.detail}")
        self.report = report


class InitialKind(str, enum.Enum):
    CONSTANT = "Constant"
    COSINE_BUMP = "CosineBump"
    GAUSSIAN_BUMP = "GaussianBump"


@dataclass(frozen=True)
class InitialDataSpec:
    kind: InitialKind
    base: float = 1.0
    amplitude: float = 0.0
    width: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "kind", InitialKind(self.kind))
        if not (np.isfinite(self.base) and self.base > 0):
            raise ValueError(f"base must be > 0, got {self.base}")
        if not 0 <= self.amplitude < 1:
            raise ValueError(f"amplitude must lie in [0, 1), got {self.amplitude}")
        if self.kind is InitialKind.GAUSSIAN_BUMP and not self.width > 0:
            raise ValueError(f"width must be > 0, got {self.width}")


def gaussian_bump_profile(r: np.ndarray, R: float, width: float) -> np.ndarray:
    """exp(-r^2/w^2) bent to have zero value and zero slope at R, peak 1 at r = 0.

    Subtracting e(R) + e'(R)(r^2 - R^2)/(2R) keeps the profile decreasing
    and nonnegative on [0, R].
    """
    e = np.exp(-(r**2) / width**2)
    eR = np.exp(-(R**2) / width**2)
    shape = e - eR + eR / width**2 * (r**2 - R**2)
    return shape / (1.0 - eR * (1.0 + R**2 / width**2))


def make_initial_data(spec: InitialDataSpec, grid: RadialGrid) -> np.ndarray:
    r = grid.cell_centers
    if spec.kind is InitialKind.CONSTANT:
        u0 = np.full(grid.N, float(spec.base))
    elif spec.kind is InitialKind.COSINE_BUMP:
        u0 = spec.base * (1.0 + spec.amplitude * np.cos(np.pi * r / grid.R))
    else:
        u0 = spec.base * (1.0 + spec.amplitude * gaussian_bump_profile(r, grid.R, spec.width))
    require_positive(u0, "initial data")
    return u0


def assemble_flux(grid: RadialGrid, u, ef: EllipticFields, params: ModelParams) -> np.ndarray:
    """Face fluxes f^(n-1) [u^p u_r/sqrt(u^2+u_r^2) - chi u^q v_r/sqrt(1+v_r^2)]; zero at both ends."""
    u = _check_cells(grid, u)
    ubar = 0.5 * (u[:-1] + u[1:])
    bad = np.flatnonzero(~(ubar > 0))
    if bad.size:
        i = int(bad[0])
        raise NonPositiveFieldError("face average of u", i + 1, float(ubar[i]))
    du = (u[1:] - u[:-1]) / grid.h
    vr = ef.vr_face[1:-1]
    fpow = grid.face_radii[1:-1] ** (grid.n - 1)
    F = np.zeros(grid.N + 1)
    F[1:-1] = fpow * (
        ubar**params.p * du / np.sqrt(ubar * ubar + du * du)
        - params.chi * ubar**params.q * vr / np.sqrt(1.0 + vr * vr)
    )
    return F


def rhs_flux_form(grid: RadialGrid, u, ef: EllipticFields, params: ModelParams) -> np.ndarray:
    F = assemble_flux(grid, u, ef, params)
    return (F[1:] - F[:-1]) / grid.volume_weights


def expanded_terms(u, u_r, u_rr, r, vr, mu, params: ModelParams) -> list[np.ndarray]:
    """The seven pointwise terms of u_t in non-divergence form, in the usual order."""
    p, q, chi, n = params.p, params.q, params.chi, params.n
    S = np.sqrt(u * u + u_r * u_r)
    W = np.sqrt(1.0 + vr * vr)
    S3 = S**3
    W3 = W**3
    return [
        u ** (p + 2) * u_rr / S3,
        p * u ** (p - 1) * u_r**4 / S3,
        (n - 1) / r * u**p * u_r / S,
        (p - 1) * u ** (p + 1) * u_r**2 / S3,
        -q * chi * u ** (q - 1) * u_r * vr / W,
        -chi * u**q * (mu - u) / W3,
        -chi * (n - 1) / r * u**q * vr**3 / W3,
    ]


def rhs_expanded(
    grid: RadialGrid, u, ef: EllipticFields, params: ModelParams, u_r=None, u_rr=None
) -> np.ndarray:
    """u_t from the expanded pointwise formula.

    Derivatives default to central differences with even reflection at both
    ends (u_r = 0 there, consistent with zero total flux because v_r vanishes
    at r = 0 and r = R). Analytic derivatives can be passed instead.
    """
    u = _check_cells(grid, u)
    require_positive(u)
    if u_r is None:
        u_r = derivative_field(grid, u, 1, boundary="neumann")[0]
    if u_rr is None:
        u_rr = derivative_field(grid, u, 2, boundary="neumann")[0]
    terms = expanded_terms(u, u_r, u_rr, grid.cell_centers, ef.vr_cell, ef.mu, params)
    out = terms[0]
    for term in terms[1:]:
        out = out + term
    return out


def stable_dt(grid: RadialGrid, u, ef: EllipticFields, params: ModelParams, control: StepControl) -> float:
    """min(dt_max, cfl_diff h^2 / max A1, cfl_adv h / max chemotactic speed)."""
    u_r = derivative_field(grid, u, 1, boundary="neumann")[0]
    a1 = u ** (params.p + 2) / np.sqrt(u * u + u_r * u_r) ** 3
    vr = ef.vr_cell
    speed = params.chi * params.q * u ** (params.q - 1) * np.abs(vr) / np.sqrt(1.0 + vr * vr)
    dt = control.dt_max
    a1_max = float(a1.max())
    if a1_max > 0:
        dt = min(dt, control.cfl_diff * grid.h**2 / a1_max)
    s_max = float(speed.max())
    if s_max > 0:
        dt = min(dt, control.cfl_adv * grid.h / s_max)
    return dt


def step(
    grid: RadialGrid, state: State, params: ModelParams, control: StepControl, dt_cap: float | None = None
) -> tuple[State, float]:
    """One Heun step. ``dt_cap`` clips the step to land on an output time.

    Raises :class:`StepError` for DtUnderflow (unclipped dt below dt_min) and
    PositivityLoss (a stage or the result has a cell <= 0).
    """
    u = state.u
    ef = solve_gradient(grid, u)
    dt = stable_dt(grid, u, ef, params, control)
    if dt < control.dt_min:
        raise StepError(EventReport(EventKind.DT_UNDERFLOW, state.t, f"dt={dt!r} < dt_min={control.dt_min!r}"))
    if dt_cap is not None and dt_cap < dt:
        dt = dt_cap
    k1 = rhs_flux_form(grid, u, ef, params)
    u1 = u + dt * k1
    _check_stage(u1, state.t + dt, "predictor")
    k2 = rhs_flux_form(grid, u1, solve_gradient(grid, u1), params)
    u2 = u + 0.5 * dt * (k1 + k2)
    _check_stage(u2, state.t + dt, "corrector")
    return State(state.t + dt, u2), dt


def _check_stage(u: np.ndarray, t: float, stage: str) -> None:
    bad = np.flatnonzero(~(u > 0))
    if bad.size:
        i = int(bad[0])
        raise StepError(
            EventReport(EventKind.POSITIVITY_LOSS, t, f"{stage} stage: u[{i}] = {float(u[i])!r}")
        )
