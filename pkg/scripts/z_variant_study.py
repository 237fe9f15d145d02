"""Residual of the z = u_t/u evolution for each coefficient reading under joint (h, dt) refinement."""

from __future__ import annotations

import argparse

from flc import coefficients as co
from flc.dynamics import InitialDataSpec
from flc.params import ModelParams

READINGS = {
    "statement": co.ZVariant.LEMMA_STATEMENT,
    "proof": co.ZVariant.PROOF_DISPLAY,
    "derived": co.ZVariant.DERIVED,
    "B21 S^1 only": co.ZTerms(1, "proof", False),
    "B3 pq-2q-1 only": co.ZTerms(3, "statement", False),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", nargs="*", default=["2,1,2", "3,2,2", "2.5,1.5,3"], help="p,q,n triples")
    args = ap.parse_args()
    for case in args.cases:
        p, q, n = case.split(",")
        params = ModelParams(float(p), float(q), 1.0, int(n), 1.0)
        setup = co.ZStudySetup(params, InitialDataSpec("CosineBump", 1.0, 0.3))
        traj = co.z_trajectories(setup)
        print(f"p={p} q={q} n={n}")
        for label, reading in READINGS.items():
            rep = co.z_residual(traj, params, reading, label)
            errs = " ".join(f"{e:.3e}" for e in rep.linf_by_level)
            print(f"  {label:<18} linf by level [{errs}] min order {rep.observed_order:6.3f}")


if __name__ == "__main__":
    main()
