"""Compiled time loop for the conservative scheme.

Same arithmetic as :func:`flc.dynamics.step`, fused into plain loops so a
run of a few hundred thousand steps on a 128-cell grid takes seconds.
"""

from __future__ import annotations

import math

import numba
import numpy as np

# Status codes returned by advance().
REACHED = 0
BUFFER_FULL = 1
BLOW_UP = 2
DT_UNDERFLOW = 3
POSITIVITY_LOSS = 4


@numba.njit(cache=True)
def _face_gradient(u, w, measure, fpow, vr_face, work):
    """v_r at faces from the shifted cumulative integral; work holds C_d."""
    N = u.shape[0]
    ref = u[0]
    acc = 0.0
    work[0] = 0.0
    for i in range(N):
        acc += w[i] * (u[i] - ref)
        work[i + 1] = acc
    delta = acc / measure[N]
    vr_face[0] = 0.0
    for i in range(1, N + 1):
        vr_face[i] = (delta * measure[i] - work[i]) / fpow[i]


@numba.njit(cache=True)
def _rhs(u, h, w, measure, fpow, p, q, chi, vr_face, work, out):
    N = u.shape[0]
    _face_gradient(u, w, measure, fpow, vr_face, work)
    f_left = 0.0
    for i in range(N):
        if i < N - 1:
            ub = 0.5 * (u[i] + u[i + 1])
            du = (u[i + 1] - u[i]) / h
            vr = vr_face[i + 1]
            f_right = fpow[i + 1] * (
                ub**p * du / math.sqrt(ub * ub + du * du) - chi * ub**q * vr / math.sqrt(1.0 + vr * vr)
            )
        else:
            f_right = 0.0
        out[i] = (f_right - f_left) / w[i]
        f_left = f_right


@numba.njit(cache=True)
def _stable_dt(u, h, p, q, chi, vr_face, cfl_diff, cfl_adv, dt_max):
    N = u.shape[0]
    a1_max = 0.0
    s_max = 0.0
    for i in range(N):
        lo = u[i - 1] if i > 0 else u[0]
        hi = u[i + 1] if i < N - 1 else u[N - 1]
        ur = (-0.5 * lo + 0.5 * hi) / h
        a1 = u[i] ** (p + 2) / math.sqrt(u[i] * u[i] + ur * ur) ** 3
        if a1 > a1_max:
            a1_max = a1
        vr = 0.5 * (vr_face[i] + vr_face[i + 1])
        s = chi * q * u[i] ** (q - 1) * abs(vr) / math.sqrt(1.0 + vr * vr)
        if s > s_max:
            s_max = s
    dt = dt_max
    if a1_max > 0.0:
        dt = min(dt, cfl_diff * h * h / a1_max)
    if s_max > 0.0:
        dt = min(dt, cfl_adv * h / s_max)
    return dt


@numba.njit(cache=True)
def advance(
    u, t, t_stop, h, w, measure, fpow, p, q, chi,
    cfl_diff, cfl_adv, dt_min, dt_max, threshold,
    hist_t, hist_min, hist_max,
):
    """Heun steps from t until t_stop, an event, or the history buffers fill.

    ``u`` is updated in place and always holds the last accepted state.
    Returns (status, t, steps_taken, last_dt, bad_index).
    """
    N = u.shape[0]
    cap = hist_t.shape[0]
    vr_face = np.empty(N + 1)
    work = np.empty(N + 1)
    k1 = np.empty(N)
    k2 = np.empty(N)
    u1 = np.empty(N)
    steps = 0
    last_dt = 0.0
    while t < t_stop:
        if steps >= cap:
            return BUFFER_FULL, t, steps, last_dt, -1
        _rhs(u, h, w, measure, fpow, p, q, chi, vr_face, work, k1)
        dt = _stable_dt(u, h, p, q, chi, vr_face, cfl_diff, cfl_adv, dt_max)
        if dt < dt_min:
            return DT_UNDERFLOW, t, steps, dt, -1
        clipped = False
        if t + dt >= t_stop:
            dt = t_stop - t
            clipped = True
        for i in range(N):
            u1[i] = u[i] + dt * k1[i]
            if not u1[i] > 0.0:
                return POSITIVITY_LOSS, t, steps, dt, i
        _rhs(u1, h, w, measure, fpow, p, q, chi, vr_face, work, k2)
        for i in range(N):
            u1[i] = u[i] + 0.5 * dt * (k1[i] + k2[i])
            if not u1[i] > 0.0:
                return POSITIVITY_LOSS, t, steps, dt, i
        umin = u1[0]
        umax = u1[0]
        for i in range(N):
            u[i] = u1[i]
            if u1[i] < umin:
                umin = u1[i]
            if u1[i] > umax:
                umax = u1[i]
        t = t_stop if clipped else t + dt
        hist_t[steps] = t
        hist_min[steps] = umin
        hist_max[steps] = umax
        steps += 1
        last_dt = dt
        if umax > threshold:
            return BLOW_UP, t, steps, last_dt, -1
    return REACHED, t, steps, last_dt, -1
