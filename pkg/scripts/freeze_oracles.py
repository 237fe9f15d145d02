"""Compute reference values symbolically and freeze them into tests/data/oracles.json.

Independent of the package: every value comes from sympy applied directly
to the radial PDE, with v_r from the exact integral of the elliptic equation.
Rerun only when the oracle set changes.
"""

from __future__ import annotations

import json
from pathlib import Path

import sympy as sp

r, s, t = sp.symbols("r s t", positive=True)
OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"


def cosine(base, amp):
    return base * (1 + amp * sp.cos(sp.pi * r))


def elliptic(u, n):
    """mu, v_r, v_rr for -Delta v = u - mu on the unit ball, radial."""
    mu = sp.simplify(n * sp.integrate(s ** (n - 1) * u.subs(r, s), (s, 0, 1)))
    vr = sp.simplify(r ** (1 - n) * sp.integrate(s ** (n - 1) * (mu - u.subs(r, s)), (s, 0, r)))
    return mu, vr, sp.diff(vr, r)


def flux(U, Ur, Vr, p, q, chi):
    return U**p * Ur / sp.sqrt(U**2 + Ur**2) - chi * U**q * Vr / sp.sqrt(1 + Vr**2)


def ut_expr(u, vr, n, p, q, chi):
    return sp.diff(r ** (n - 1) * flux(u, sp.diff(u, r), vr, p, q, chi), r) / r ** (n - 1)


def num(x):
    return float(sp.N(x, 30))


def pq_points():
    out = []
    for (p, q) in [(1, 1), (2, 1), (sp.Rational(3, 2), sp.Rational(3, 2)), (3, 2)]:
        for n in (1, 2, 3):
            u = cosine(1, sp.Rational(1, 10))
            mu, vr, vrr = elliptic(u, n)
            ut = ut_expr(u, vr, n, p, q, 1)
            r0 = sp.Rational(37, 100)
            vals = {k: num(e.subs(r, r0)) for k, e in {
                "u": u, "u_r": sp.diff(u, r), "u_rr": sp.diff(u, r, 2), "u_rrr": sp.diff(u, r, 3),
                "vr": vr, "vrr": vrr, "ut": ut, "ut_r": sp.diff(ut, r)}.items()}
            out.append({"p": float(p), "q": float(q), "n": n, "chi": 1.0, "r": 0.37, "mu": num(mu), **vals})
    return out


def z_points():
    """z_t at a point via u_tt = dF/dt with v_r evolving by its own flux identity."""
    out = []
    for (p, q, n) in [(2, 1, 2), (3, 2, 2), (sp.Rational(5, 2), sp.Rational(3, 2), 3), (1, 1, 1)]:
        chi = 1
        u = cosine(1, sp.Rational(3, 10))
        mu, vr, _ = elliptic(u, n)
        # Treat (u, u_r, u_rr, v_r) as independent slots so the time derivative can be chained.
        U, U1, U2, V = sp.symbols("U U1 U2 V")
        Vrr = mu - U - (n - 1) * V / r
        S = sp.sqrt(U**2 + U1**2)
        W = sp.sqrt(1 + V**2)
        bracket = U**p * U1 / S - chi * U**q * V / W
        # d/dr of the bracket along the profile, written in slot form.
        dbr = (sp.diff(bracket, U) * U1 + sp.diff(bracket, U1) * U2 + sp.diff(bracket, V) * Vrr)
        F = dbr + (n - 1) / r * bracket
        subs = {U: u, U1: sp.diff(u, r), U2: sp.diff(u, r, 2), V: vr}
        ut = F.subs(subs)
        vrt = -bracket.subs(subs)
        utt = (sp.diff(F, U).subs(subs) * ut + sp.diff(F, U1).subs(subs) * sp.diff(ut, r)
               + sp.diff(F, U2).subs(subs) * sp.diff(ut, r, 2) + sp.diff(F, V).subs(subs) * vrt)
        z = ut / u
        zt = utt / u - ut**2 / u**2
        r0 = sp.Rational(41, 100)
        vals = {k: num(e.subs(r, r0)) for k, e in {
            "u": u, "u_r": sp.diff(u, r), "u_rr": sp.diff(u, r, 2), "vr": vr,
            "z": z, "z_r": sp.diff(z, r), "z_rr": sp.diff(z, r, 2), "z_t": zt}.items()}
        out.append({"p": float(p), "q": float(q), "n": n, "chi": 1.0, "r": 0.41, "mu": num(mu), **vals})
    return out


def elliptic_samples():
    out = []
    for n in (1, 2, 3):
        u = cosine(1, sp.Rational(1, 2))
        mu, vr, vrr = elliptic(u, n)
        radii = [sp.Rational(k, 10) for k in (1, 3, 5, 7, 9)]
        out.append({"n": n, "mu": num(mu), "r": [num(x) for x in radii],
                    "vr": [num(vr.subs(r, x)) for x in radii], "vrr": [num(vrr.subs(r, x)) for x in radii]})
    return out


def main() -> None:
    data = {
        "profile": "base*(1 + amplitude*cos(pi r)), R = 1",
        "mu_cosine_half_n2": num(1 - 2 / sp.pi**2),
        "integral_r_n2": num(sp.Rational(1, 3)),
        "elliptic": elliptic_samples(),
        "pq_points": pq_points(),
        "z_points": z_points(),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
