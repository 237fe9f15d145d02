"""Built-in verification suite behind ``flc verify``.

Every check yields rows of (name, variant, linf, observed_order, status).
Status is PASS/FAIL for ordinary checks, XFAIL/XPASS for negative controls
(a control that passes is a failure), and INFO for per-variant rows whose
outcome is judged by a summary row.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import coefficients as co
from . import comparison as cmp
from .convergence import build_report, observed_orders
from .dynamics import InitialDataSpec, State, rhs_expanded, rhs_flux_form
from .elliptic import check_vr_bounds, solve_gradient
from .estimates import energy_identity_residual, kernel_margin, mass_residual, moser_iterate
from .grid import GridSpec, build_grid
from .params import ModelParams

log = logging.getLogger(__name__)

ORDER_MIN = 1.8
ULPS = 8
CLOSED_FORM_TOL = 1e-10
PQ_CASES = ((1.0, 1.0), (2.0, 1.0), (1.5, 1.5), (3.0, 2.0))
PQ_LEVELS = (128, 256, 512)
Z_LEVELS = (64, 128, 256)


@dataclass(frozen=True)
class VerifyRow:
    name: str
    variant: str
    linf: float
    order: float
    status: str

    @property
    def failed(self) -> bool:
        return self.status in ("FAIL", "XPASS")


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _control_status(control_passed: bool) -> str:
    return "XPASS" if control_passed else "XFAIL"


# ---------------------------------------------------------------------------
# elliptic


def check_elliptic(seed: int = 20240601) -> Iterator[VerifyRow]:
    rng = np.random.default_rng(seed)
    worst_ulps, worst_margin = 0.0, math.inf
    for _ in range(100):
        n = int(rng.integers(1, 5))
        N = int(rng.integers(8, 400))
        R = float(rng.uniform(0.25, 3.0))
        grid = build_grid(GridSpec(n, R, N))
        u = rng.exponential(size=N) * rng.uniform(0.1, 50.0)
        ef = solve_gradient(grid, u)
        worst_ulps = max(worst_ulps, abs(ef.vr_face[-1]) / np.spacing(ef.mu * R / n))
        sup = float(u.max())
        b = check_vr_bounds(grid, u, ef, sup)
        worst_margin = min(worst_margin, b.min_margin / max(1.0, sup))
    yield VerifyRow("vr_face_N_zero", "ulps", worst_ulps, math.nan, _status(worst_ulps <= ULPS))
    yield VerifyRow("vr_bound_margins", "min/scale", worst_margin, math.nan, _status(worst_margin >= -1e-10))
    for n in (2, 3):
        rep = compatibility_study(n)
        yield VerifyRow("elliptic_compatibility", f"n={n}", rep.linf, rep.observed_order,
                        _status(rep.observed_order >= ORDER_MIN))


def compatibility_study(n: int, levels=PQ_LEVELS):
    """Interior max of v_rr + (n-1)/r v_r - (mu - u) for a smooth profile."""
    prof = co.cosine_profile(1.0, 0.3, 1.0)
    linf, l2 = [], []
    for N in levels:
        grid = build_grid(GridSpec(n, 1.0, N))
        u = prof.value(grid.cell_centers)
        ef = solve_gradient(grid, u)
        res = ef.vrr_cell + (n - 1) / grid.cell_centers * ef.vr_cell - (ef.mu - u)
        linf.append(float(np.max(np.abs(res[1:-1]))))
        l2.append(0.0)
    return build_report(levels, linf, l2, label="compatibility")


def flux_expanded_study(params: ModelParams, levels=PQ_LEVELS):
    prof = co.cosine_profile(1.0, 0.1, params.R)
    linf = []
    for N in levels:
        grid = build_grid(GridSpec(params.n, params.R, N))
        u = prof.value(grid.cell_centers)
        ef = solve_gradient(grid, u)
        diff = rhs_flux_form(grid, u, ef, params) - rhs_expanded(grid, u, ef, params)
        linf.append(float(np.max(np.abs(diff[2:-2]))))
    return build_report(levels, linf, linf, label="flux vs expanded")


def check_flux_forms() -> Iterator[VerifyRow]:
    for p, q in ((2.0, 1.0), (1.5, 1.5)):
        rep = flux_expanded_study(ModelParams(p, q, 1.0, 2, 1.0))
        yield VerifyRow("flux_vs_expanded", f"p={p:g},q={q:g}", rep.linf, rep.observed_order,
                        _status(rep.observed_order >= ORDER_MIN))


# ---------------------------------------------------------------------------
# coefficient algebra


def check_pq() -> Iterator[VerifyRow]:
    prof = co.cosine_profile(1.0, 0.1, 1.0)
    for p, q in PQ_CASES:
        params = ModelParams(p, q, 1.0, 2, 1.0)
        for name, fn in (("P_residual", co.p_residual), ("Q_residual", co.q_residual)):
            rep = fn(prof, params, PQ_LEVELS)
            yield VerifyRow(name, f"p={p:g},q={q:g}", rep.linf, rep.observed_order,
                            _status(rep.observed_order >= ORDER_MIN))
    params = ModelParams(2.0, 1.0, 1.0, 2, 1.0)
    for name, fn in (("P_residual_printed", co.p_residual), ("Q_residual_printed", co.q_residual)):
        rep = fn(prof, params, PQ_LEVELS, printed=True)
        yield VerifyRow(name, "p=2,q=1 (control)", rep.linf, rep.observed_order,
                        _control_status(rep.observed_order >= ORDER_MIN))
    yield split_identity_row()


def split_identity_gap_ulps(params: ModelParams, N: int = 256) -> float:
    """Worst |(A3 u_r + A4) - (A3~ u_r + A4~)| in ulps of the largest summand."""
    grid = build_grid(GridSpec(params.n, params.R, N))
    prof = co.cosine_profile(1.0, 0.1, params.R)
    r = grid.cell_centers
    u, u_r, u_rr = prof.value(r), prof.d1(r), prof.d2(r)
    ef = solve_gradient(grid, u)
    c = co.pq_coefficients(u, u_r, u_rr, r, ef.vr_cell, ef.vrr_cell, ef.mu, params)
    gap = np.abs(co.split_identity_gap(c, u_r))
    scale = np.maximum.reduce([np.abs(c.A3 * u_r), np.abs(c.A4), np.abs(c.A3_tilde * u_r), np.abs(c.A4_tilde)])
    return float(np.max(gap / np.spacing(scale)))


def split_identity_row() -> VerifyRow:
    worst = max(split_identity_gap_ulps(ModelParams(p, q, 1.0, n, 1.0)) for p, q in PQ_CASES for n in (1, 2, 3))
    return VerifyRow("split_identity", "ulps", worst, math.nan, _status(worst <= ULPS))


def z_study(params: ModelParams, levels=Z_LEVELS):
    setup = co.ZStudySetup(params, InitialDataSpec("CosineBump", 1.0, 0.3), levels=tuple(levels))
    return co.z_trajectories(setup)


def check_z() -> Iterator[VerifyRow]:
    params = ModelParams(2.0, 1.0, 1.0, 2, 1.0)
    traj = z_study(params)
    # Each disputed term is varied with the other held at its proof-display reading.
    disputes = {
        "z_B21_lead": {"S^1 (statement)": co.ZTerms(1, "proof", False), "S^3 (proof)": co.ZTerms(3, "proof", False)},
        "z_B3_mixed": {"pq-2q-1 (statement)": co.ZTerms(3, "statement", False),
                       "pq-2q+1 (proof)": co.ZTerms(3, "proof", False)},
    }
    for name, options in disputes.items():
        passing = []
        for label, terms in options.items():
            rep = co.z_residual(traj, params, terms, label)
            ok = rep.observed_order >= ORDER_MIN
            if ok:
                passing.append(label)
            yield VerifyRow(name, label, rep.linf, rep.observed_order, "INFO")
        chosen = passing[0] if len(passing) == 1 else f"{len(passing)} variants decrease"
        yield VerifyRow(name + "_resolved", chosen, math.nan, math.nan, _status(len(passing) == 1))

    general = ModelParams(3.0, 2.0, 1.0, 2, 1.0)
    traj_q = z_study(general)
    for variant in co.ZVariant:
        rep = co.z_residual(traj_q, general, variant)
        ok = rep.observed_order >= ORDER_MIN
        if variant is co.ZVariant.DERIVED:
            yield VerifyRow("z_general_q", variant.value + " p=3,q=2", rep.linf, rep.observed_order, _status(ok))
        else:
            yield VerifyRow("z_general_q", variant.value + " p=3,q=2 (control)", rep.linf, rep.observed_order,
                            _control_status(ok))
    yield z_steady_row()


def z_steady_row() -> VerifyRow:
    params = ModelParams(2.0, 1.0, 1.0, 2, 1.0)
    grid = build_grid(GridSpec(2, 1.0, 64))
    u = np.full(grid.N, 1.3)
    states = [State(0.0, u), State(0.01, u.copy()), State(0.02, u.copy())]
    worst = 0.0
    for variant in co.ZVariant:
        res, interior = co.z_residual_field(grid, states, params, variant)
        worst = max(worst, float(np.max(np.abs(res[interior]))))
    return VerifyRow("z_steady_state", "all variants", worst, math.nan, _status(worst <= 1e-12))


# ---------------------------------------------------------------------------
# closed forms


def random_riccati_spec(rng: np.random.Generator) -> cmp.RiccatiSpec:
    C1, C2, C4 = (float(x) for x in rng.uniform(0.1, 10.0, size=3))
    C3 = 2.0 * math.sqrt(C2 * C4) * float(rng.uniform(1.01, 5.0))
    ct = (C3**2 - 4.0 * C2 * C4) / (4.0 * C2**2)
    M = math.sqrt(ct) * float(rng.uniform(1.01, 10.0))
    return cmp.RiccatiSpec(C1, C2, C3, C4, M)


def random_tangent_spec(rng: np.random.Generator, direction: cmp.Direction) -> cmp.TangentCompSpec:
    a, c = (float(x) for x in rng.uniform(0.1, 10.0, size=2))
    b = 2.0 * math.sqrt(a * c) * float(rng.uniform(0.0, 0.99))
    ct = (4 * a * c - b * b) / (4 * a * a)
    D = math.sqrt(ct) * float(rng.uniform(-3.0, 3.0))
    return cmp.TangentCompSpec(a, b, c, D, int(rng.integers(0, 6)), int(rng.integers(1, 4)), direction)


def sample_branch_times(spec: cmp.TangentCompSpec, rng: np.random.Generator, count: int) -> list[float]:
    """Times inside random branches, redrawn when they land within the pole guard."""
    out = []
    while len(out) < count:
        n = int(rng.integers(1, 4))
        j = int(rng.integers(0, 6))
        lo, hi = cmp.branch_interval(spec, n, j)
        t = lo + (hi - lo) * float(rng.uniform(1e-6, 1.0))
        try:
            cmp.tangent_phi(spec, t)
        except cmp.PoleError:
            continue
        out.append(t)
    return out


def check_closed_forms(seed: int = 7) -> Iterator[VerifyRow]:
    rng = np.random.default_rng(seed)
    worst_res, worst_root = 0.0, 0.0
    for _ in range(100):
        spec = random_riccati_spec(rng)
        t1 = cmp.riccati_root_time(spec)
        for t in np.linspace(0.0, 2.0 * t1, 20):
            worst_res = max(worst_res, abs(cmp.riccati_residual(spec, float(t))) / cmp.riccati_scale(spec))
        worst_root = max(worst_root, abs(cmp.riccati_g(spec, t1)))
    yield VerifyRow("riccati_residual", "100 specs x 20 t", worst_res, math.nan, _status(worst_res <= CLOSED_FORM_TOL))
    yield VerifyRow("riccati_root", "|g(t1)|", worst_root, math.nan, _status(worst_root <= CLOSED_FORM_TOL))

    ex = cmp.RiccatiSpec(1.0, 1.0, 3.0, 2.0, 1.5)
    err = max(abs(cmp.riccati_g(ex, 0.0) - 1.5), abs(cmp.riccati_root_time(ex) - math.log(10.0 / 7.0)))
    yield VerifyRow("riccati_worked_example", "(1,1,3,2,1.5)", err, math.nan, _status(err <= 1e-12))
    ctrl = max(abs(cmp.riccati_residual(ex, t, printed_shift=True)) for t in (0.0, 0.1, 0.3))
    yield VerifyRow("riccati_printed_shift", "C3/(2C3) (control)", ctrl, math.nan,
                    _control_status(ctrl <= CLOSED_FORM_TOL))

    for direction in cmp.Direction:
        worst = 0.0
        for _ in range(100):
            spec = random_tangent_spec(rng, direction)
            for t in sample_branch_times(spec, rng, 20):
                worst = max(worst, abs(cmp.tangent_residual(spec, t)) / cmp.tangent_scale(spec, t))
        yield VerifyRow("tangent_residual", direction.value, worst, math.nan, _status(worst <= CLOSED_FORM_TOL))


# ---------------------------------------------------------------------------
# estimates


def energy_study(params: ModelParams, m: float, levels=Z_LEVELS):
    traj = z_study(params, levels)
    errs, bitwise = [], True
    for N in sorted(traj):
        grid, states = traj[N]
        errs.append(abs(energy_identity_residual(grid, states, m, params)))
        if m == 1.0:
            same = energy_identity_residual(grid, states, 1.0, params) == mass_residual(grid, states)
            bitwise = bitwise and same
    return errs, bitwise


def check_estimates(seed: int = 11) -> Iterator[VerifyRow]:
    params = ModelParams(2.0, 1.0, 1.0, 2, 1.0)
    errs1, bitwise = energy_study(params, 1.0)
    yield VerifyRow("energy_m1_equals_mass", "bitwise", max(errs1), math.nan, _status(bitwise))
    errs3, _ = energy_study(params, 3.0)
    order = min(observed_orders(errs3))
    yield VerifyRow("energy_identity", "m=3", errs3[-1], order, _status(order >= ORDER_MIN))

    rng = np.random.default_rng(seed)
    a = rng.exponential(size=100_000) * 10.0 ** rng.uniform(-6, 6, size=100_000)
    b = rng.exponential(size=100_000) * 10.0 ** rng.uniform(-6, 6, size=100_000) + 1e-300
    margin = kernel_margin(a, b)
    yield VerifyRow("kernel_inequality", "1e5 pairs", float(margin.min()), math.nan, _status(bool(np.all(margin >= 0))))

    worst = 0.0
    for b_ in (1.1, 1.5, 2.0):
        for M0 in (1.0, 2.0, 10.0):
            _, root = moser_iterate(M0, b_, 40, 2.0)
            worst = max(worst, abs(root - b_**2 * M0))
    yield VerifyRow("moser_root_k40", "|root - b^2 M0|", worst, math.nan, _status(worst <= 1e-9))


CHECKS: dict[str, Callable[[], Iterator[VerifyRow]]] = {
    "elliptic": check_elliptic,
    "flux": check_flux_forms,
    "pq": check_pq,
    "z": check_z,
    "closed_forms": check_closed_forms,
    "estimates": check_estimates,
}


def run_all() -> list[VerifyRow]:
    rows = []
    for name, fn in CHECKS.items():
        start = time.perf_counter()
        rows.extend(fn())
        log.info("verify group %s took %.2f s", name, time.perf_counter() - start)
    return rows


def format_table(rows: list[VerifyRow]) -> str:
    def num(x: float) -> str:
        return "-" if math.isnan(x) else f"{x:.3e}"

    head = f"{'test':<26} {'variant':<36} {'linf':>11} {'order':>8}  status"
    lines = [head, "-" * len(head)]
    for r in rows:
        order = "-" if math.isnan(r.order) else f"{r.order:.3f}"
        lines.append(f"{r.name:<26} {r.variant:<36} {num(r.linf):>11} {order:>8}  {r.status}")
    return "\n".join(lines)
