"""Coefficient bundles of the u_r equation (operators P, Q) and of the z = u_t/u equation.

Both families are checked the same way: evaluate the left side from the
discrete solution, the right side from the coefficient bundle, and watch the
residual shrink under grid refinement.

The u_r equation reads

    u_rt = A1 u_rrr + A2 u_rr + a3 u_r^2 + A3 u_r + A4
         = A1 u_rrr + A2 u_rr + a3 u_r^2 + A3~ u_r + A4~.

``printed=True`` reproduces the textbook form of A2, Phi and A4~ term for
term; that form leaves an O(1) residual and is kept for comparison only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .convergence import ResidualReport, build_report, weighted_l2
from .dynamics import InitialDataSpec, State, StepControl, rhs_expanded
from .elliptic import EllipticFields, solve_gradient
from .errors import require_positive
from .grid import GridSpec, RadialGrid, build_grid, derivative_field
from .params import ModelParams


@dataclass(frozen=True, eq=False)
class PQCoefficients:
    A1: np.ndarray = field(repr=False)
    A2: np.ndarray = field(repr=False)
    a3: np.ndarray = field(repr=False)
    A3: np.ndarray = field(repr=False)
    A4: np.ndarray = field(repr=False)
    Phi: np.ndarray = field(repr=False)
    Psi: np.ndarray = field(repr=False)
    A3_tilde: np.ndarray = field(repr=False)
    A4_tilde: np.ndarray = field(repr=False)

    def p_form(self, u_r, u_rr, u_rrr):
        return self.A1 * u_rrr + self.A2 * u_rr + self.a3 * u_r**2 + self.A3 * u_r + self.A4

    def q_form(self, u_r, u_rr, u_rrr):
        return self.A1 * u_rrr + self.A2 * u_rr + self.a3 * u_r**2 + self.A3_tilde * u_r + self.A4_tilde


def pq_coefficients(
    u, u_r, u_rr, r, vr, vrr, mu: float, params: ModelParams, printed: bool = False
) -> PQCoefficients:
    """Pointwise coefficient fields; v_r and v_rr are taken as given."""
    u = np.asarray(u, dtype=np.float64)
    require_positive(u)
    p, q, chi, n = params.p, params.q, params.chi, params.n
    S = np.sqrt(u * u + u_r * u_r)
    W = np.sqrt(1.0 + vr * vr)
    S3, S5 = S**3, S**5
    W3, W5 = W**3, W**5
    nr = (n - 1) / r

    A1 = u ** (p + 2) / S3
    # The chemotactic term of A2 multiplies u_rr through v_r alone.
    chemo_a2 = -q * chi * u ** (q - 1) * (u_r * vr if printed else vr) / W
    A2 = (
        (p + 2) * u ** (p + 1) * u_r**3 / S5
        - 3 * u ** (p + 2) * u_r * u_rr / S5
        + (p - 1) * u ** (p + 3) * u_r / S5
        + 4 * p * u ** (p + 1) * u_r**3 / S5
        + p * u ** (p - 1) * u_r**5 / S5
        + nr * u ** (p + 2) / S3
        + (p - 1) * u ** (p + 1) * u_r * (2 * u * u - u_r * u_r) / S5
        + chemo_a2
    )
    a3 = p * (p - 1) * u ** (p - 2) * u_r**5 / S5 - q * (q - 1) * chi * u ** (q - 2) * vr / W

    if printed:
        phi_head = (p - 1) * (p - 2) * u ** (p + 2) * u_r / S5 + (p - 1) * (p + 1) * u**p * u_r**3 / S5
        phi_vrr = -q * chi * u ** (q - 1) * vrr / W3
    else:
        phi_head = (p - 1) * (p - 2) * u ** (p + 2) * u_r**2 / S5 + (p - 1) * (p + 1) * u**p * u_r**4 / S5
        phi_vrr = -q * chi * u ** (q - 1) * vrr / W
    Phi = (
        phi_head
        - q * chi * mu * u ** (q - 1) / W3
        + (q + 1) * chi * u**q / W3
        + phi_vrr
        + q * chi * u ** (q - 1) * vr**2 * vrr / W3
        - q * chi * nr * u ** (q - 1) * vr**3 / W3
    )
    Psi = (
        (p - 1) * nr * u ** (p + 1) * u_r**2 / S3
        + 3 * chi * mu * u**q * vr * vrr / W5
        - 3 * chi * u ** (q + 1) * vr * vrr / W5
        + chi * (n - 1) / r**2 * u**q * vr**3 / W3
        - 3 * chi * nr * u**q * vr**2 * vrr / W5
    )
    A3 = p * (p - 4) * u**p * u_r**4 / S5 - (n - 1) / r**2 * u**p / S + Phi
    A4 = p * nr * u ** (p - 1) * u_r**4 / S3 + Psi
    A3_tilde = p * nr * u ** (p - 1) * u_r**3 / S3 + Phi
    if printed:
        A4_tilde = p * (p - 4) * u**p * u_r**4 / S5 - (n - 1) / r**2 * u**p / S + Psi
    else:
        A4_tilde = p * (p - 4) * u**p * u_r**5 / S5 - (n - 1) / r**2 * u**p * u_r / S + Psi
    return PQCoefficients(A1, A2, a3, A3, A4, Phi, Psi, A3_tilde, A4_tilde)


@dataclass(frozen=True)
class AnalyticProfile:
    """Smooth radial profile with exact derivatives up to third order."""

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    d3: Callable[[np.ndarray], np.ndarray]


def cosine_profile(base: float = 1.0, amplitude: float = 0.1, R: float = 1.0) -> AnalyticProfile:
    k = math.pi / R
    return AnalyticProfile(
        name=f"{base}*(1+{amplitude}cos(pi r/R))",
        value=lambda r: base * (1.0 + amplitude * np.cos(k * r)),
        d1=lambda r: -base * amplitude * k * np.sin(k * r),
        d2=lambda r: -base * amplitude * k**2 * np.cos(k * r),
        d3=lambda r: base * amplitude * k**3 * np.sin(k * r),
    )


def constant_profile(c: float) -> AnalyticProfile:
    return AnalyticProfile(
        name=f"const {c}",
        value=lambda r: np.full_like(r, c),
        d1=np.zeros_like,
        d2=np.zeros_like,
        d3=np.zeros_like,
    )


def pq_residual_field(
    grid: RadialGrid, profile: AnalyticProfile, params: ModelParams, use_q: bool = False, printed: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """(residual, interior mask): d/dr of the expanded u_t minus the P (or Q) form.

    The profile's derivatives are exact; v_r, v_rr come from the discrete
    elliptic solve and d/dr of the u_t field is a central difference, so the
    residual is a pure discretisation error when the identity holds.
    """
    r = grid.cell_centers
    u, u_r, u_rr, u_rrr = profile.value(r), profile.d1(r), profile.d2(r), profile.d3(r)
    ef = solve_gradient(grid, u)
    ut = rhs_expanded(grid, u, ef, params, u_r=u_r, u_rr=u_rr)
    lhs, mask = derivative_field(grid, ut, 1)
    c = pq_coefficients(u, u_r, u_rr, r, ef.vr_cell, ef.vrr_cell, ef.mu, params, printed=printed)
    rhs = c.q_form(u_r, u_rr, u_rrr) if use_q else c.p_form(u_r, u_rr, u_rrr)
    return lhs - rhs, ~mask


def _pq_study(profile, params, levels, use_q, printed, label) -> ResidualReport:
    linf, l2 = [], []
    for N in levels:
        grid = build_grid(GridSpec(params.n, params.R, N))
        res, interior = pq_residual_field(grid, profile, params, use_q=use_q, printed=printed)
        linf.append(float(np.max(np.abs(res[interior]))))
        l2.append(weighted_l2(res[interior], grid.volume_weights[interior]))
    return build_report(levels, linf, l2, interior_only=True, label=label)


def p_residual(
    profile: AnalyticProfile, params: ModelParams, levels: Sequence[int] = (128, 256, 512), printed: bool = False
) -> ResidualReport:
    return _pq_study(profile, params, levels, False, printed, "P" + (" printed" if printed else ""))


def q_residual(
    profile: AnalyticProfile, params: ModelParams, levels: Sequence[int] = (128, 256, 512), printed: bool = False
) -> ResidualReport:
    return _pq_study(profile, params, levels, True, printed, "Q" + (" printed" if printed else ""))


def split_identity_gap(c: PQCoefficients, u_r: np.ndarray) -> np.ndarray:
    """(A3 u_r + A4) - (A3~ u_r + A4~), zero up to rounding for the corrected split."""
    return (c.A3 * u_r + c.A4) - (c.A3_tilde * u_r + c.A4_tilde)


# ---------------------------------------------------------------------------
# z = u_t / u


class ZVariant(str, enum.Enum):
    """Readings of the two disputed B-terms, plus the fully derived form.

    LEMMA_STATEMENT: B21 leads with 2u^(p+1)u_r/S, B3 mixed coefficient pq-2q-1.
    PROOF_DISPLAY:   B21 leads with 2u^(p+1)u_r/S^3, B3 mixed coefficient pq-2q+1.
    DERIVED:         PROOF_DISPLAY plus the factor q that the chain rule puts on
                     the chi u^(q-1) terms of B21 and B4; the mixed coefficient
                     becomes q(p-q). Identical to PROOF_DISPLAY when q = 1.
    """

    LEMMA_STATEMENT = "LemmaStatement"
    PROOF_DISPLAY = "ProofDisplay"
    DERIVED = "Derived"


@dataclass(frozen=True)
class ZTerms:
    """Per-term choice: B21 leading power of S, B3 mixed-coefficient rule, q factor."""

    b21_power: int
    b3_mixed: str  # "statement" | "proof" | "derived"
    q_factor: bool

    @classmethod
    def of(cls, variant: ZVariant) -> "ZTerms":
        return {
            ZVariant.LEMMA_STATEMENT: cls(1, "statement", False),
            ZVariant.PROOF_DISPLAY: cls(3, "proof", False),
            ZVariant.DERIVED: cls(3, "derived", True),
        }[ZVariant(variant)]

    def mixed_coefficient(self, p: float, q: float) -> float:
        if self.b3_mixed == "statement":
            return p * q - 2 * q - 1
        if self.b3_mixed == "proof":
            return p * q - 2 * q + 1
        if self.b3_mixed == "derived":
            return q * (p - q)
        raise ValueError(f"unknown B3 mixed-coefficient rule {self.b3_mixed!r}")


@dataclass(frozen=True, eq=False)
class ZCoefficients:
    B1: np.ndarray = field(repr=False)
    B21: np.ndarray = field(repr=False)
    B22: np.ndarray = field(repr=False)
    B3: np.ndarray = field(repr=False)
    B4: np.ndarray = field(repr=False)
    terms: ZTerms = ZTerms(3, "proof", False)


def z_field(grid: RadialGrid, u, ef: EllipticFields, params: ModelParams) -> np.ndarray:
    """z = u_t / u with u_t from the expanded form (even-reflection derivatives)."""
    u = np.asarray(u, dtype=np.float64)
    require_positive(u)
    return rhs_expanded(grid, u, ef, params) / u


def z_coefficients(
    u, u_r, u_rr, r, vr, mu: float, params: ModelParams, variant: ZVariant | ZTerms = ZVariant.PROOF_DISPLAY
) -> ZCoefficients:
    u = np.asarray(u, dtype=np.float64)
    require_positive(u)
    terms = variant if isinstance(variant, ZTerms) else ZTerms.of(variant)
    p, q, chi, n = params.p, params.q, params.chi, params.n
    k = q if terms.q_factor else 1.0
    S = np.sqrt(u * u + u_r * u_r)
    W2 = 1.0 + vr * vr
    W = np.sqrt(W2)
    S3, S5 = S**3, S**5
    W3, W5 = W**3, W**5
    nr = (n - 1) / r
    dev = mu - u

    B1 = u ** (p + 2) / S3
    B21 = (
        2 * u ** (p + 1) * u_r / S**terms.b21_power
        - 3 * u ** (p + 2) * u_r * u_rr / S5
        + 4 * p * u ** (p - 1) * u_r**3 / S3
        - 3 * p * u ** (p - 1) * u_r**5 / S5
        + (p - 1) * u ** (p + 1) * u_r * (2 * u * u - u_r * u_r) / S5
        - k * chi * u ** (q - 1) * vr / W
    )
    B22 = (n - 1) * u ** (p + 2) / S3
    B3 = (
        chi * u**q / W3
        + (p - q) * chi * u ** (q - 1) / W3 * (dev + nr * vr**3)
        + terms.mixed_coefficient(p, q) * chi * u ** (q - 1) * u_r * vr / (u * W)
    )
    B4 = (
        -3 * chi * u ** (p + q - 1) * dev * u_r * vr / (S * W5)
        + 3 * chi**2 * u ** (2 * q - 1) * dev * vr**2 / W2**3
        + k * chi * u ** (p + q - 2) * u_r**2 / (S * W3)
        - k * chi**2 * u ** (2 * q - 2) * u_r * vr / W2**2
        + 3 * chi * nr * u ** (p + q - 1) * u_r * vr**2 / (S * W5)
        - 3 * chi**2 * nr * u ** (2 * q - 1) * vr**3 / W2**3
    )
    return ZCoefficients(B1, B21, B22, B3, B4, terms)


# Cells excluded at each end of the z residual: z uses reflected derivatives
# of u, and z_rr widens the stencil by one more cell.
_Z_EDGE = 3


def z_residual_field(
    grid: RadialGrid, states: Sequence[State], params: ModelParams, variant: ZVariant | ZTerms
) -> tuple[np.ndarray, np.ndarray]:
    """(residual, interior mask) of z_t = B1 z_rr + (B21 + B22/r) z_r + (p-1) z^2 + B3 z + B4.

    z_t is the centred difference of z over three equispaced states; every
    spatial quantity is evaluated at the middle state by finite differences.
    """
    if len(states) != 3:
        raise ValueError(f"need exactly three states, got {len(states)}")
    s0, s1, s2 = states
    d1, d2 = s1.t - s0.t, s2.t - s1.t
    if not (d1 > 0 and abs(d2 - d1) <= 1e-9 * d1):
        raise ValueError(f"states are not equispaced in time: {s0.t!r}, {s1.t!r}, {s2.t!r}")
    zs = [z_field(grid, s.u, solve_gradient(grid, s.u), params) for s in states]
    z_t = (zs[2] - zs[0]) / (s2.t - s0.t)
    u = s1.u
    ef = solve_gradient(grid, u)
    u_r = derivative_field(grid, u, 1, boundary="neumann")[0]
    u_rr = derivative_field(grid, u, 2, boundary="neumann")[0]
    z = zs[1]
    z_r = derivative_field(grid, z, 1)[0]
    z_rr = derivative_field(grid, z, 2)[0]
    B = z_coefficients(u, u_r, u_rr, grid.cell_centers, ef.vr_cell, ef.mu, params, variant)
    rhs = B.B1 * z_rr + (B.B21 + B.B22 / grid.cell_centers) * z_r + (params.p - 1) * z * z + B.B3 * z + B.B4
    interior = np.zeros(grid.N, dtype=bool)
    interior[_Z_EDGE:grid.N - _Z_EDGE] = True
    return z_t - rhs, interior


@dataclass(frozen=True)
class ZStudySetup:
    """Joint (h, dt) refinement: at level N the three states sit at t_mid and t_mid +- t_mid*base_N/(K N)."""

    params: ModelParams
    initial: InitialDataSpec
    levels: tuple[int, ...] = (64, 128, 256)
    t_mid: float = 0.04
    steps_at_coarsest: int = 8


def z_trajectories(setup: ZStudySetup, control: StepControl | None = None) -> dict[int, tuple[RadialGrid, list]]:
    """Run each level and return its grid and the three states around t_mid."""
    from .simulate import DiagnosticsConfig, run

    control = control or StepControl()
    out = {}
    quiet = DiagnosticsConfig(mass=True, vr_bounds=False, floor=False, z_plus=False, ur_z_ratio=False)
    for N in setup.levels:
        K = setup.steps_at_coarsest * N // setup.levels[0]
        dt_rec = setup.t_mid / K
        captured: list[State] = []
        result = run(
            setup.params, setup.initial, control, (K + 1) * dt_rec, N, quiet, dt_rec,
            on_record=lambda st, ef, rec: captured.append(st),
        )
        if result.event.kind.value != "Completed":
            raise RuntimeError(f"z study run at N={N} ended with {result.event}")
        out[N] = (result.grid, captured[-3:])
    return out


def z_residual(
    trajectories: dict[int, tuple[RadialGrid, list]],
    params: ModelParams,
    variant: ZVariant | ZTerms,
    label: str = "",
) -> ResidualReport:
    levels = sorted(trajectories)
    linf, l2 = [], []
    for N in levels:
        grid, states = trajectories[N]
        res, interior = z_residual_field(grid, states, params, variant)
        linf.append(float(np.max(np.abs(res[interior]))))
        l2.append(weighted_l2(res[interior], grid.volume_weights[interior]))
    name = label or (variant.value if isinstance(variant, ZVariant) else str(variant))
    return build_report(levels, linf, l2, interior_only=True, label=name)
