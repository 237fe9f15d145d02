"""Closed-form comparison functions: the Riccati solution g and the tangent sawtooth.

Riccati: C1 g' + C2 g^2 + C3 g + C4 = 0, g(0) = M. With a = C3/(2 C2) and
w = g + a this is C1 w' = -C2 (w^2 - C~), C~ = (C3^2 - 4 C2 C4)/(4 C2^2),
whose decreasing solution from w(0) = M + a is

    g(t) = 2 sqrt(C~) / (1 - D exp(-2 C2 sqrt(C~) t / C1)) - a - sqrt(C~).

Tangent: on each branch of length pi/(6k) the lower function solves
phi' = -c4 phi^2 + c5 phi - c6 and the upper one phi' = c6 phi^2 + c7 phi + c8,
restarting from the seed value at the left end of every branch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

POLE_GUARD = 1e-9  # in units of the branch length


@dataclass(frozen=True)
class RiccatiSpec:
    C1: float
    C2: float
    C3: float
    C4: float
    M: float

    def __post_init__(self):
        for name in ("C1", "C2", "C3", "C4"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be > 0, got {v}")
        disc = self.C3**2 - 4.0 * self.C2 * self.C4
        if not disc > 0:
            raise ValueError(f"need C3^2 - 4 C2 C4 > 0, got {disc}")
        if not self.M > math.sqrt(self.C_tilde):
            raise ValueError(f"need M > sqrt(C~) = {math.sqrt(self.C_tilde)!r}, got M = {self.M}")

    @property
    def C_tilde(self) -> float:
        return (self.C3**2 - 4.0 * self.C2 * self.C4) / (4.0 * self.C2**2)

    @property
    def shift(self) -> float:
        """C3 / (2 C2)."""
        return self.C3 / (2.0 * self.C2)

    @property
    def D(self) -> float:
        s = math.sqrt(self.C_tilde)
        return (self.M + self.shift - s) / (self.M + self.shift + s)

    @property
    def rate(self) -> float:
        return 2.0 * self.C2 * math.sqrt(self.C_tilde) / self.C1


def riccati_g(spec: RiccatiSpec, t: float, *, printed_shift: bool = False) -> float:
    """Closed-form g(t). ``printed_shift`` swaps the shift for C3/(2 C3) = 1/2 (negative control)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    s = math.sqrt(spec.C_tilde)
    shift = 0.5 if printed_shift else spec.shift
    return 2.0 * s / (1.0 - spec.D * math.exp(-spec.rate * t)) - shift - s


def riccati_g_prime(spec: RiccatiSpec, t: float) -> float:
    s = math.sqrt(spec.C_tilde)
    e = spec.D * math.exp(-spec.rate * t)
    return -2.0 * s * spec.rate * e / (1.0 - e) ** 2


def riccati_residual(spec: RiccatiSpec, t: float, *, printed_shift: bool = False) -> float:
    g = riccati_g(spec, t, printed_shift=printed_shift)
    return spec.C1 * riccati_g_prime(spec, t) + spec.C2 * g * g + spec.C3 * g + spec.C4


def riccati_scale(spec: RiccatiSpec) -> float:
    return max(1.0, spec.M**2 * spec.C2)


def riccati_root_time(spec: RiccatiSpec) -> float:
    """The time t1 > 0 where g reaches zero."""
    s = math.sqrt(spec.C_tilde)
    a = spec.shift
    # a > s always: a^2 - C~ = C4/C2 > 0.
    arg = spec.D * (a + s) / (a - s)
    if not arg > 1:
        raise ValueError(f"g has no positive root: log argument {arg!r} <= 1 (needs M > 0)")
    return spec.C1 / (2.0 * spec.C2 * s) * math.log(arg)


# ---------------------------------------------------------------------------
# Tangent sawtooth


class Direction(str, enum.Enum):
    LOWER = "Lower"
    UPPER = "Upper"


class PoleError(ValueError):
    """Evaluation point within the guard radius of a tangent pole."""

    def __init__(self, t: float, t_pole: float):
        super().__init__(f"t={t!r} is within {POLE_GUARD} branch lengths of the pole at t={t_pole!r}")
        self.t = t
        self.t_pole = t_pole


@dataclass(frozen=True)
class TangentCompSpec:
    """(c4t, c5t, c6t) are the quadratic, linear and constant coefficients.

    Lower: phi' = -c4t phi^2 + c5t phi - c6t.  Upper: phi' = c4t phi^2 + c5t phi + c6t.
    ``branch_j`` in 0..5 and ``branch_n`` >= 1 select the default branch for
    :func:`branch_interval`; evaluation works on any branch.
    """

    c4t: float
    c5t: float
    c6t: float
    D: float
    branch_j: int = 0
    branch_n: int = 1
    direction: Direction = Direction.LOWER

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if not (self.c4t > 0 and self.c5t >= 0 and self.c6t > 0):
            raise ValueError(f"need c4t > 0, c5t >= 0, c6t > 0, got {self.c4t}, {self.c5t}, {self.c6t}")
        if not 4.0 * self.c4t * self.c6t - self.c5t**2 > 0:
            raise ValueError("need 4 c4t c6t - c5t^2 > 0")
        if self.branch_j not in range(6):
            raise ValueError(f"branch_j must be in 0..5, got {self.branch_j}")
        if int(self.branch_n) != self.branch_n or self.branch_n < 1:
            raise ValueError(f"branch_n must be a positive integer, got {self.branch_n}")
        if not math.isfinite(self.D):
            raise ValueError("D must be finite")

    @property
    def C_tilde(self) -> float:
        return (4.0 * self.c4t * self.c6t - self.c5t**2) / (4.0 * self.c4t**2)

    @property
    def k(self) -> float:
        """Angular speed c4t sqrt(C~); one branch has length pi/(6k)."""
        return self.c4t * math.sqrt(self.C_tilde)

    @property
    def offset(self) -> float:
        o = self.c5t / (2.0 * self.c4t)
        return o if self.direction is Direction.LOWER else -o

    @property
    def sign(self) -> float:
        return -1.0 if self.direction is Direction.LOWER else 1.0

    @property
    def branch_length(self) -> float:
        return math.pi / (6.0 * self.k)

    @property
    def seed(self) -> float:
        return self.D + self.offset


def branch_interval(spec: TangentCompSpec, n: int | None = None, j: int | None = None) -> tuple[float, float]:
    """Half-open branch ((6n-6+j) L, (6n-5+j) L] with L = pi/(6k)."""
    n = spec.branch_n if n is None else n
    j = spec.branch_j if j is None else j
    L = spec.branch_length
    return (6 * n - 6 + j) * L, (6 * n - 5 + j) * L


def _angle(spec: TangentCompSpec, t: float) -> tuple[float, float]:
    """(tangent argument, position within the current branch in [0, 1))."""
    L = spec.branch_length
    m = math.ceil(t / L) - 1  # branch index: t in (m L, (m+1) L]
    # Every branch restarts from the seed, so only the position inside matters:
    # theta0 + sign * k (t - m L) with the j shift absorbed into m.
    tau = t - m * L
    theta = math.atan(spec.D / math.sqrt(spec.C_tilde)) + spec.sign * spec.k * tau
    return theta, tau / L


def _pole_check(spec: TangentCompSpec, t: float, theta: float) -> None:
    # Distance to the nearest odd multiple of pi/2, converted to time.
    nearest = math.pi / 2 + math.pi * round((theta - math.pi / 2) / math.pi)
    dt = abs(theta - nearest) / spec.k
    if dt <= POLE_GUARD * spec.branch_length:
        raise PoleError(t, t + spec.sign * (nearest - theta) / spec.k)


def tangent_phi(spec: TangentCompSpec, t: float) -> float:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return spec.seed
    theta, _ = _angle(spec, t)
    _pole_check(spec, t, theta)
    return math.sqrt(spec.C_tilde) * math.tan(theta) + spec.offset


def tangent_phi_dt(spec: TangentCompSpec, t: float) -> float:
    """Analytic time derivative sign * c4t C~ sec^2(theta)."""
    if t <= 0:
        raise ValueError(f"derivative is defined for t > 0, got {t}")
    theta, _ = _angle(spec, t)
    _pole_check(spec, t, theta)
    return spec.sign * spec.c4t * spec.C_tilde / math.cos(theta) ** 2


def tangent_ode_rhs(spec: TangentCompSpec, phi: float) -> float:
    if spec.direction is Direction.LOWER:
        return -spec.c4t * phi * phi + spec.c5t * phi - spec.c6t
    return spec.c4t * phi * phi + spec.c5t * phi + spec.c6t


def tangent_residual(spec: TangentCompSpec, t: float) -> float:
    return tangent_phi_dt(spec, t) - tangent_ode_rhs(spec, tangent_phi(spec, t))


def tangent_scale(spec: TangentCompSpec, t: float) -> float:
    phi = tangent_phi(spec, t)
    return max(1.0, spec.c4t * phi * phi, abs(spec.c5t * phi), spec.c6t)


def pole_times(spec: TangentCompSpec, n: int | None = None, j: int | None = None) -> list[float]:
    """Poles inside the given branch (at most one, since the angle moves by pi/6)."""
    lo, hi = branch_interval(spec, n, j)
    theta0 = math.atan(spec.D / math.sqrt(spec.C_tilde))
    theta1 = theta0 + spec.sign * math.pi / 6
    a, b = min(theta0, theta1), max(theta0, theta1)
    out = []
    for m in range(-2, 2):
        pole = math.pi / 2 + m * math.pi
        if a < pole <= b:
            out.append(lo + abs(pole - theta0) / spec.k)
    return [t for t in out if lo < t <= hi]


def lower_spec_from_bounds(
    c1: float, c2: float, c3: float, mu: float, p: float, q: float, chi: float, n: int, R: float,
    alpha1: float, inflate: float = 1.01,
) -> TangentCompSpec:
    """Lower-bound spec built from observed sup u (c1) and v bounds (c2 r, c3).

    c4~, c5~ are the coefficient lower limits inflated by ``inflate`` (c5~
    is raised further if needed so that 4 c4~ c6 < c5~^2); c6~ then solves
    sqrt(4 c4~ c6~ - c5~^2) = 2/3 + alpha1 and D puts the seed at
    (2/3 + alpha1) tan(-pi / (3 (2/3 + alpha1))) / (2 c4~) + c5~/(2 c4~).
    """
    if not alpha1 > 0:
        raise ValueError(f"alpha1 must be > 0, got {alpha1}")
    c4 = p * (p - 1) * c1 ** (p - 2) + q * (q - 1) * chi * c1 ** (q - 2)
    c5 = 3 * p * (p + 1) * c1 ** (p - 2) + q * (c1 + 2 * c3 + mu) * chi * c1 ** (q - 1)
    c6 = 3 * (mu * c3 + c1 * c3 + (n - 1) * c2**2 / 3 + (n - 1) * c2 * c3) * chi * c1**q * c2 * R
    c4t = max(c4 * inflate, 1e-12)
    c5t = c5 * inflate
    if 4 * c4t * c6 - c5t**2 >= 0:
        c5t = math.sqrt(4 * c4t * c6) * inflate
    x = 2.0 / 3.0 + alpha1
    c6t = (x * x + c5t**2) / (4 * c4t)
    D = x / (2 * c4t) * math.tan(-math.pi / (3 * x))
    return TangentCompSpec(c4t, c5t, c6t, D, direction=Direction.LOWER)


@dataclass(frozen=True)
class EnvelopeReport:
    violations: int
    min_margin: float
    checked: int
    skipped: int


def comparison_envelope_check(
    times: Sequence[float],
    u_r_fields: Sequence[np.ndarray],
    phi_lower: TangentCompSpec | None = None,
    phi_upper: TangentCompSpec | None = None,
) -> EnvelopeReport:
    """Count cells and records with u_r < phi_lower(t) or u_r > phi_upper(t).

    Records where a comparison function is within the pole guard are
    skipped and counted separately.
    """
    if len(times) == 0 or len(times) != len(u_r_fields):
        raise ValueError("need one recorded u_r field per time")
    violations, checked, skipped = 0, 0, 0
    margin = math.inf
    for t, ur in zip(times, u_r_fields):
        ur = np.asarray(ur, dtype=np.float64)
        try:
            lo = tangent_phi(phi_lower, t) if phi_lower is not None else -math.inf
            hi = tangent_phi(phi_upper, t) if phi_upper is not None else math.inf
        except PoleError:
            skipped += 1
            continue
        checked += 1
        gap = np.minimum(ur - lo, hi - ur)
        violations += int(np.count_nonzero(gap < 0))
        margin = min(margin, float(gap.min()))
    return EnvelopeReport(violations, margin, checked, skipped)
