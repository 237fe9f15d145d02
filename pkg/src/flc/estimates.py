"""Quantitative bounds: extinction floor, kernel inequality, L^m energy balance,
Gagliardo-Nirenberg quotient, Moser recursion and the regime classifier."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import State
from .elliptic import solve_gradient
from .grid import RadialGrid, _check_cells, cell_integral, derivative_field
from .params import ModelParams

DEFAULT_TOL_FLOOR = 0.01


class RegimeLabel(str, enum.Enum):
    GLOBAL_BOUNDED = "GlobalBounded"
    BLOW_UP_KNOWN = "BlowUpKnown"
    OPEN = "Open"


def regime_threshold(q: float, n: int) -> float:
    return q + 1.0 - 1.0 / n


def classify_regime(p: float, q: float, n: int) -> RegimeLabel:
    """Global boundedness strictly above p = q + 1 - 1/n, known blow-up for p <= q."""
    if not (p >= 1 and q >= 1):
        raise ValueError(f"need p >= 1 and q >= 1, got p={p}, q={q}")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if p <= q:
        return RegimeLabel.BLOW_UP_KNOWN
    if p > regime_threshold(q, n):
        return RegimeLabel.GLOBAL_BOUNDED
    return RegimeLabel.OPEN


def kappa(chi: float, mu: float, sup_u: float, q: float) -> float:
    """Decay rate 2 chi mu sup_u^(q-1) of the extinction floor."""
    if not (chi > 0 and mu > 0 and sup_u > 0 and q > 0):
        raise ValueError(f"kappa needs positive inputs, got chi={chi}, mu={mu}, sup_u={sup_u}, q={q}")
    return 2.0 * chi * mu * sup_u ** (q - 1.0)


@dataclass(frozen=True)
class FloorCheck:
    kappa: float
    floor_ratio_min: float
    satisfied: bool


def check_extinction_floor(
    t: Sequence[float], min_u: Sequence[float], inf_u0: float, kappa_value: float, tol_floor: float = DEFAULT_TOL_FLOOR
) -> FloorCheck:
    """min over samples of min_u(t) / (inf_u0 exp(-kappa t)).

    ``t`` and ``min_u`` are the per-step (or per-record) spatial minima of a
    trajectory; kappa is normally built from the space-time sup of u.
    """
    t = np.asarray(t, dtype=np.float64)
    min_u = np.asarray(min_u, dtype=np.float64)
    if t.size == 0:
        raise ValueError("empty trajectory")
    ratio = min_u / (inf_u0 * np.exp(-kappa_value * t))
    rmin = float(ratio.min())
    return FloorCheck(kappa_value, rmin, rmin >= 1.0 - tol_floor)


def kernel_margin(a, b):
    """a^2/sqrt(a^2+b^2) + b - a, computed without cancellation or overflow.

    With s = hypot(a, b) the margin equals b (1 - (a/s) (b/(s+a))). The
    product is at most 1/2, so the subtraction keeps at least half of the
    leading term and rounding cannot flip the sign the way a^2/s + b - a can.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = np.hypot(a, b)
    return b * (1.0 - (a / s) * (b / (s + a)))


def pointwise_kernel_check(a: float, b: float) -> bool:
    """a <= a^2/sqrt(a^2+b^2) + b for a >= 0, b > 0."""
    return bool(kernel_margin(a, b) >= 0)


def integrated_kernel_check(grid: RadialGrid, u, r_exp: float) -> tuple[float, float]:
    """(lhs, rhs) of int u^(r-1)|u_r| <= int u^(r-1) u_r^2/sqrt(u^2+u_r^2) + int u^r."""
    u = _check_cells(grid, u)
    u_r = np.abs(derivative_field(grid, u, 1, boundary="neumann")[0])
    lhs = cell_integral(grid, u ** (r_exp - 1) * u_r)
    rhs = cell_integral(grid, u ** (r_exp - 1) * u_r**2 / np.hypot(u, u_r)) + cell_integral(grid, u**r_exp)
    return lhs, rhs


def lm_norm(grid: RadialGrid, u, m: float) -> float:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    u = _check_cells(grid, u)
    return cell_integral(grid, u**m) ** (1.0 / m)


def energy_terms(grid: RadialGrid, u, m: float, params: ModelParams) -> tuple[float, float, float]:
    """(int u^m, int u^(m+p-2) u_r^2/S, int u^(m+q-2) u_r v_r/W) with r^(n-1) weights."""
    u = _check_cells(grid, u)
    u_r = derivative_field(grid, u, 1, boundary="neumann")[0]
    vr = solve_gradient(grid, u).vr_cell
    mass_m = cell_integral(grid, u**m)
    diff = cell_integral(grid, u ** (m + params.p - 2) * u_r**2 / np.sqrt(u * u + u_r * u_r))
    cross = cell_integral(grid, u ** (m + params.q - 2) * u_r * vr / np.sqrt(1.0 + vr * vr))
    return mass_m, diff, cross


def energy_identity_residual(
    grid: RadialGrid, states: Sequence[State], m: float, params: ModelParams
) -> float:
    """d/dt int u^m + m(m-1) int u^(m+p-2) u_r^2/S - m(m-1) chi int u^(m+q-2) u_r v_r/W.

    The time derivative is the centred difference over three equispaced
    states; the integrals are taken at the middle one. At m = 1 the two
    gradient terms carry the factor 0 exactly, so the value equals the
    centred mass difference.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    s0, s1, s2 = _equispaced(states)
    dt = s1.t - s0.t
    i0 = cell_integral(grid, s0.u**m)
    i2 = cell_integral(grid, s2.u**m)
    _, diff, cross = energy_terms(grid, s1.u, m, params)
    c = m * (m - 1.0)
    return (i2 - i0) / (2.0 * dt) + c * diff - c * params.chi * cross


def mass_residual(grid: RadialGrid, states: Sequence[State]) -> float:
    s0, s1, _ = _equispaced(states)
    return (cell_integral(grid, states[2].u) - cell_integral(grid, s0.u)) / (2.0 * (s1.t - s0.t))


def _equispaced(states: Sequence[State], rtol: float = 1e-9):
    if len(states) != 3:
        raise ValueError(f"need exactly three states, got {len(states)}")
    s0, s1, s2 = states
    d1, d2 = s1.t - s0.t, s2.t - s1.t
    if not (d1 > 0 and abs(d2 - d1) <= rtol * d1):
        raise ValueError(f"states are not equispaced in time: {s0.t!r}, {s1.t!r}, {s2.t!r}")
    return s0, s1, s2


@dataclass(frozen=True)
class GNReport:
    lhs: float
    grad_term: float
    implied_constant: float


def gn_quotient(grid: RadialGrid, u, m: float, alpha: float, eta: float, params: ModelParams) -> GNReport:
    """Implied constant in int u^(m+p+a) <= eta int |(u^(m+p-1))_r| + C^m (eta^e + 1).

    Diagnostic only: e = -n(m+p+a-1)/(-n a - n + 1), and C is whatever makes
    the inequality tight for this field.
    """
    p, n = params.p, params.n
    if not (-m - p < alpha < -1.0 + 1.0 / n):
        raise ValueError(f"alpha must lie in ({-m - p}, {-1.0 + 1.0 / n}), got {alpha}")
    if not eta > 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    u = _check_cells(grid, u)
    lhs = cell_integral(grid, u ** (m + p + alpha))
    g = derivative_field(grid, u ** (m + p - 1), 1, boundary="neumann")[0]
    grad_term = eta * cell_integral(grid, np.abs(g))
    expo = -n * (m + p + alpha - 1) / (-n * alpha - n + 1)
    implied = max(0.0, lhs - grad_term) ** (1.0 / m) / (eta**expo + 1.0) ** (1.0 / m)
    return GNReport(lhs, grad_term, implied)


def moser_iterate(M0: float, b: float, k: int, p: float) -> tuple[float, float]:
    """(b^(2^(k+1)) M0^(2^k), that bound to the power 1/(2^k + p - 1)).

    Once the bound overflows (returned as inf) the root is taken in log
    space; it stays finite and tends to b^2 M0.
    """
    if not b > 1:
        raise ValueError(f"b must be > 1, got {b}")
    if not M0 >= 1:
        raise ValueError(f"M0 must be >= 1, got {M0}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    two_k = 2.0**k
    m_k = two_k + p - 1.0
    try:
        bound = b ** (2.0 * two_k) * M0**two_k
    except OverflowError:
        bound = math.inf
    if math.isfinite(bound):
        return bound, bound ** (1.0 / m_k)
    log_bound = 2.0 * two_k * math.log(b) + two_k * math.log(M0)
    return math.inf, math.exp(log_bound / m_k)
