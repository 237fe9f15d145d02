"""Exact radial solve of 0 = Lap v - mu + u for v_r and v_rr, and bound monitors.

Only v_r and v_rr are ever formed; v itself carries an arbitrary constant.
Both are written in terms of the deviation mu - u,

    v_r(r)  = r^(1-n) int_0^r rho^(n-1) (mu - u) d rho,
    v_rr(r) = (mu - u) - (n-1)/r v_r(r),

which is algebraically the same as mu r/n - r^(1-n) int rho^(n-1) u, but
makes constant states produce exactly zero fields instead of rounding noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import require_nonnegative, require_positive
from .grid import RadialGrid, _check_cells
from .params import ModelParams

DEFAULT_TOL_BOUND = 1e-10


@dataclass(frozen=True, eq=False)
class EllipticFields:
    mu: float
    vr_face: np.ndarray = field(repr=False)
    vr_cell: np.ndarray = field(repr=False)
    vrr_cell: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class BoundReport:
    vr_upper_margin: float
    vr_lower_margin: float
    vr_linfty_margin: float
    vrr_margin: float
    all_satisfied: bool

    @property
    def min_margin(self) -> float:
        return min(self.vr_upper_margin, self.vr_lower_margin, self.vr_linfty_margin, self.vrr_margin)


def _shifted_mean(grid: RadialGrid, u: np.ndarray):
    """Split mu = ref + delta with ref = u[0]; returns (ref, d = u - ref, C_d, delta)."""
    ref = u[0]
    d = u - ref
    C_d = np.empty(grid.N + 1)
    C_d[0] = 0.0
    np.cumsum(grid.volume_weights * d, out=C_d[1:])
    delta = C_d[-1] / grid.face_measure[-1]
    return ref, d, C_d, delta


def compute_mu(grid: RadialGrid, u) -> float:
    """Spatial average n R^-n int u r^(n-1) dr.

    Averages the deviation from u[0] so that a constant field returns its
    value exactly.
    """
    u = _check_cells(grid, u)
    ref, _, _, delta = _shifted_mean(grid, u)
    return float(ref + delta)


def solve_gradient(grid: RadialGrid, u) -> EllipticFields:
    u = _check_cells(grid, u)
    n = grid.n
    ref, d, C_d, delta = _shifted_mean(grid, u)
    # G_f = int_0^f rho^(n-1) (mu - u); keeping delta separate from ref makes
    # G_N = delta*M - C_d[N] cancel to about one ulp of C_d[N].
    G = delta * grid.face_measure - C_d
    G[0] = 0.0
    f = grid.face_radii
    vr_face = np.zeros(grid.N + 1)
    vr_face[1:] = G[1:] / f[1:] ** (n - 1)
    vr_cell = 0.5 * (vr_face[:-1] + vr_face[1:])

    # Within cell i the integrand is constant, so the integral up to r_i is exact.
    r = grid.cell_centers
    dev = delta - d
    G_center = G[:-1] + dev * (r**n - f[:-1] ** n) / n
    vrr_cell = dev - (n - 1) * G_center / r**n
    return EllipticFields(mu=float(ref + delta), vr_face=vr_face, vr_cell=vr_cell, vrr_cell=vrr_cell)


def compute_vrt(u, u_r, ef: EllipticFields, params: ModelParams) -> np.ndarray:
    """v_rt = -u^p u_r / sqrt(u^2 + u_r^2) + chi u^q v_r / sqrt(1 + v_r^2) at cells."""
    u = np.asarray(u, dtype=np.float64)
    u_r = np.asarray(u_r, dtype=np.float64)
    require_positive(u)
    vr = ef.vr_cell
    return -(u**params.p) * u_r / np.sqrt(u * u + u_r * u_r) + params.chi * u**params.q * vr / np.sqrt(1.0 + vr * vr)


def check_vr_bounds(
    grid: RadialGrid, u, ef: EllipticFields, sup_u: float | None = None, tol_bound: float = DEFAULT_TOL_BOUND
) -> BoundReport:
    """Margins of the a-priori bounds on v_r and v_rr; negative means violated.

    The v_r bounds are evaluated at faces 1..N, where v_r is the exact value
    for the piecewise-constant field; v_rr bounds at cell centres. The
    tolerance is scaled by max(1, sup u).
    """
    u = _check_cells(grid, u)
    require_nonnegative(u)
    if sup_u is None:
        sup_u = float(u.max())
    n, R = grid.n, grid.R
    mu = ef.mu
    f = grid.face_radii[1:]
    vr = ef.vr_face[1:]
    upper = float(np.min(mu * f / n - vr))
    lower = float(np.min(vr + mu * R**n / n * f ** (1 - n)))
    linfty = float(np.min(sup_u * f / n - np.abs(vr)))
    vrr = float(np.min(sup_u - np.abs(ef.vrr_cell)))
    tol = tol_bound * max(1.0, sup_u)
    ok = min(upper, lower, linfty, vrr) >= -tol
    return BoundReport(upper, lower, linfty, vrr, bool(ok))
