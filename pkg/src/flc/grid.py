"""Radial cell-centred grid on (0, R) with exact r^(n-1) measure weights.

All integrals are taken per unit sphere surface, i.e. with the measure
r^(n-1) dr; the surface constant of the n-sphere is dropped everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MIN_CELLS = 4


@dataclass(frozen=True)
class GridSpec:
    n: int
    R: float
    N: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"grid dimension n must be a positive integer, got {self.n}")
        if not (np.isfinite(self.R) and self.R > 0):
            raise ValueError(f"grid radius R must be positive, got {self.R}")
        if int(self.N) != self.N or self.N < MIN_CELLS:
            raise ValueError(f"cell count N must be an integer >= {MIN_CELLS}, got {self.N}")


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform grid of N cells; face i sits at i*h, cell i at (i+1/2)*h."""

    spec: GridSpec
    h: float
    cell_centers: np.ndarray = field(repr=False)
    face_radii: np.ndarray = field(repr=False)
    volume_weights: np.ndarray = field(repr=False)
    face_measure: np.ndarray = field(repr=False)  # f_i^n / n

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def R(self) -> float:
        return self.spec.R

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def total_volume(self) -> float:
        """R^n / n, the measure of (0, R)."""
        return self.R**self.n / self.n

    def integrate(self, u) -> float:
        return cell_integral(self, u)

    def cumulative(self, u) -> np.ndarray:
        return cumulative_integral(self, u)

    def derivative(self, u, order: int, boundary: str = "one_sided"):
        return derivative_field(self, u, order, boundary=boundary)


def face_radii(R: float, N: int) -> np.ndarray:
    faces = np.arange(N + 1, dtype=np.float64) * (R / N)
    faces[-1] = R
    return faces


def radial_weights(n: int, R: float, N: int) -> np.ndarray:
    """Closed-form cell measures (f_{i+1}^n - f_i^n)/n; no minimum N enforced."""
    # Differencing the rounded face measures (instead of dividing differences
    # by n) keeps the running sum within 1 ulp of R^n/n.
    return np.diff(face_radii(R, N) ** n / n)


def build_grid(spec: GridSpec) -> RadialGrid:
    n, R, N = spec.n, float(spec.R), spec.N
    h = R / N
    faces = face_radii(R, N)
    centers = (np.arange(N, dtype=np.float64) + 0.5) * h
    measure = faces**n / n
    weights = np.diff(measure)
    for arr in (faces, centers, weights, measure):
        arr.flags.writeable = False
    return RadialGrid(
        spec=spec, h=h, cell_centers=centers, face_radii=faces, volume_weights=weights, face_measure=measure
    )


def _check_cells(grid: RadialGrid, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (grid.N,):
        raise ValueError(f"cell field must have shape ({grid.N},), got {u.shape}")
    return u


def cell_integral(grid: RadialGrid, u) -> float:
    """Sum_i w_i u_i, accumulated left to right."""
    u = _check_cells(grid, u)
    # np.cumsum is strictly sequential; np.sum would use pairwise summation
    # and break agreement with cumulative_integral at the last face.
    return float(np.cumsum(grid.volume_weights * u)[-1])


def cumulative_integral(grid: RadialGrid, u) -> np.ndarray:
    """Face values of int_0^f rho^(n-1) u d rho; face 0 is exactly zero."""
    u = _check_cells(grid, u)
    out = np.empty(grid.N + 1)
    out[0] = 0.0
    np.cumsum(grid.volume_weights * u, out=out[1:])
    return out


# Central stencils (offset -> weight) scaled by 1/h^order.
_CENTRAL = {
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}
# Second-order one-sided stencils at the left end; offsets relative to the cell.
_FORWARD = {
    1: {0: -1.5, 1: 2.0, 2: -0.5},
    2: {0: 2.0, 1: -5.0, 2: 4.0, 3: -1.0},
    3: {0: -2.5, 1: 9.0, 2: -12.0, 3: 7.0, 4: -1.5},
}


def derivative_field(grid: RadialGrid, u, order: int, boundary: str = "one_sided"):
    """Finite-difference r-derivative of a cell field.

    Returns ``(values, boundary_mask)``. Interior cells use second-order
    central stencils. With ``boundary="one_sided"`` the outermost ``order``
    cells on each side use second-order one-sided stencils; with
    ``boundary="neumann"`` the field is extended evenly across r = 0 and
    r = R (ghost cells) and the central stencil is used everywhere. In both
    cases ``boundary_mask`` marks the cells whose stencil is not the plain
    interior one, so residual checks can skip them.
    """
    if order not in _CENTRAL:
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    u = _check_cells(grid, u)
    N = grid.N
    if N < 2 * order + 2:
        raise ValueError(f"grid with N={N} too small for derivative order {order}")
    half = max(_CENTRAL[order])
    scale = grid.h**order
    out = np.zeros(N)
    mask = np.zeros(N, dtype=bool)
    mask[:half] = True
    mask[N - half:] = True

    if boundary == "neumann":
        ext = np.concatenate([u[half - 1::-1], u, u[:N - half - 1:-1]])
        for off, wgt in _CENTRAL[order].items():
            out += wgt * ext[half + off:half + off + N]
        return out / scale, mask
    if boundary != "one_sided":
        raise ValueError(f"unknown boundary treatment {boundary!r}")

    for off, wgt in _CENTRAL[order].items():
        out[half:N - half] += wgt * u[half + off:N - half + off]
    # One-sided weights sum to zero; differencing against the anchor cell
    # makes constants cancel exactly.
    sign = -1.0 if order % 2 else 1.0  # mirrored stencil: odd derivatives flip sign
    for i in range(half):
        lo, hi = u[i], u[N - 1 - i]
        out[i] = sum(wgt * (u[i + off] - lo) for off, wgt in _FORWARD[order].items())
        out[N - 1 - i] = sign * sum(wgt * (u[N - 1 - i - off] - hi) for off, wgt in _FORWARD[order].items())
    return out / scale, mask
