from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flc.dynamics import State
from flc.estimates import (
    RegimeLabel,
    check_extinction_floor,
    classify_regime,
    energy_identity_residual,
    energy_terms,
    gn_quotient,
    integrated_kernel_check,
    kappa,
    kernel_margin,
    lm_norm,
    mass_residual,
    moser_iterate,
    pointwise_kernel_check,
    regime_threshold,
)
from flc.grid import GridSpec, build_grid
from flc.params import ModelParams


@pytest.mark.parametrize("p,q,n,label", [
    (2, 1, 2, RegimeLabel.GLOBAL_BOUNDED), (1, 1, 2, RegimeLabel.BLOW_UP_KNOWN), (1.2, 1, 2, RegimeLabel.OPEN),
    (1, 1, 3, RegimeLabel.BLOW_UP_KNOWN), (1.5, 1, 2, RegimeLabel.OPEN), (1.0001, 1, 1, RegimeLabel.GLOBAL_BOUNDED),
])
def test_classification_examples(p, q, n, label):
    assert classify_regime(p, q, n) is label


def test_threshold_value():
    assert regime_threshold(1.0, 2) == 1.5
    assert regime_threshold(2.0, 3) == pytest.approx(3.0 - 1.0 / 3.0)


@given(p=st.floats(1, 10), q=st.floats(1, 10), n=st.integers(1, 8))
def test_classification_partitions_quadrant(p, q, n):
    label = classify_regime(p, q, n)
    thr = q + 1 - 1 / n
    expected = (RegimeLabel.BLOW_UP_KNOWN if p <= q else
                RegimeLabel.GLOBAL_BOUNDED if p > thr else RegimeLabel.OPEN)
    assert label is expected


def test_kappa_examples():
    assert kappa(1.5, 2.0, 123.0, 1.0) == 6.0
    assert kappa(1.0, 2.0, 3.0, 2.0) == 12.0
    assert kappa(0.5, 1.0, 2.0, 3.0) == 4.0
    with pytest.raises(ValueError):
        kappa(0.0, 1.0, 1.0, 1.0)


def test_floor_check():
    t = np.linspace(0, 1, 11)
    ok = check_extinction_floor(t, np.full(11, 2.0), 2.0, 0.5)
    assert ok.floor_ratio_min == 1.0 and ok.satisfied
    bad = check_extinction_floor(t, 2.0 * np.exp(-t), 2.0, 0.5)
    assert not bad.satisfied and bad.floor_ratio_min == pytest.approx(math.exp(-0.5))


def test_kernel_examples():
    assert pointwise_kernel_check(0.0, 1.0)
    assert float(kernel_margin(1.0, 1.0)) == pytest.approx(1 / math.sqrt(2) + 1 - 1)
    # a -> infinity with b fixed: the margin tends to b
    assert float(kernel_margin(1e12, 1.0)) == pytest.approx(1.0, rel=1e-12)
    assert float(kernel_margin(1e300, 1e300)) == pytest.approx(1e300 / math.sqrt(2), rel=1e-12)


@given(a=st.floats(0, 1e150), b=st.floats(1e-150, 1e150))
def test_kernel_never_falsified(a, b):
    assert pointwise_kernel_check(a, b)


def test_kernel_vectorised_population():
    rng = np.random.default_rng(3)
    a = rng.exponential(size=10_000) * 10.0 ** rng.uniform(-8, 8, 10_000)
    b = rng.exponential(size=10_000) * 10.0 ** rng.uniform(-8, 8, 10_000) + 1e-300
    assert np.all(kernel_margin(a, b) >= 0)


def test_integrated_kernel_inequality():
    g = build_grid(GridSpec(2, 1.0, 64))
    u = 1.0 + 0.9 * np.cos(math.pi * g.cell_centers)
    for r_exp in (1.0, 2.0, 3.5):
        lhs, rhs = integrated_kernel_check(g, u, r_exp)
        assert lhs <= rhs


def test_lm_norm_properties():
    g = build_grid(GridSpec(3, 1.0, 40))
    c = 1.7
    assert lm_norm(g, np.full(40, c), 2.0) == pytest.approx(c * (1 / 3) ** 0.5, rel=1e-14)
    u = 1.0 + 0.5 * np.cos(math.pi * g.cell_centers)
    vol = 1.0 / 3.0
    normalised = [lm_norm(g, u, m) / vol ** (1 / m) for m in (1, 2, 4, 8, 16, 32, 64)]
    assert all(a <= b * (1 + 1e-14) for a, b in zip(normalised, normalised[1:]))
    assert normalised[-1] <= u.max() and normalised[-1] > 0.85 * u.max()
    with pytest.raises(ValueError):
        lm_norm(g, u, 0.5)


def test_energy_identity_m1_is_mass_residual_and_steady_state_is_zero():
    g = build_grid(GridSpec(2, 1.0, 32))
    rng = np.random.default_rng(1)
    states = [State(0.1 * k, 1 + 0.1 * rng.random(32)) for k in range(3)]
    params = ModelParams(2.0, 1.0, 1.0, 2)
    assert energy_identity_residual(g, states, 1.0, params) == mass_residual(g, states)
    flat = [State(0.1 * k, np.full(32, 1.3)) for k in range(3)]
    assert energy_identity_residual(g, flat, 3.0, params) == 0.0
    _, diff, cross = energy_terms(g, np.full(32, 1.3), 3.0, params)
    assert diff == 0.0 and cross == 0.0


def test_gn_quotient():
    g = build_grid(GridSpec(2, 1.0, 64))
    params = ModelParams(2.0, 1.0, 1.0, 2)
    flat = gn_quotient(g, np.full(64, 1.2), 2.0, -0.6, 0.5, params)
    assert flat.grad_term == 0.0 and math.isfinite(flat.implied_constant)
    with pytest.raises(ValueError):
        gn_quotient(g, np.full(64, 1.2), 2.0, -0.5, 0.5, params)  # alpha at the upper edge -1 + 1/n
    consts = []
    for N in (64, 128, 256):
        gg = build_grid(GridSpec(2, 1.0, N))
        u = 1.0 + 0.5 * np.cos(math.pi * gg.cell_centers)
        consts.append(gn_quotient(gg, u, 4.0, -0.6, 0.5, params).implied_constant)
    assert max(consts) - min(consts) <= 0.01 * max(consts)


def test_moser_examples():
    bound, root = moser_iterate(2.0, 1.5, 1, 1.0)
    assert bound == 20.25 and root == 4.5
    roots = [moser_iterate(1.0, 1.5, k, 2.0)[1] for k in range(1, 21)]
    assert all(abs(b - 2.25) <= abs(a - 2.25) for a, b in zip(roots, roots[1:]))
    for b in (1.1, 1.5, 2.0):
        for M0 in (1.0, 2.0, 10.0):
            bound, root = moser_iterate(M0, b, 40, 2.0)
            assert abs(root - b * b * M0) <= 1e-9
    with pytest.raises(ValueError):
        moser_iterate(1.0, 1.0, 3, 1.0)
