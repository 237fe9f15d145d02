"""Check recorded u_r against user-supplied tangent comparison functions on the reference run."""

from __future__ import annotations

import argparse

import numpy as np

from flc.comparison import Direction, TangentCompSpec, comparison_envelope_check, lower_spec_from_bounds, pole_times
from flc.config import parse_config
from flc.grid import build_grid, derivative_field
from flc.simulate import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/reference.json")
    ap.add_argument("--alpha1", type=float, default=0.05)
    args = ap.parse_args()
    cfg = parse_config(args.config)
    times, fields = [], []

    grid = build_grid(cfg.grid)

    def keep(state, ef, rec):
        times.append(state.t)
        fields.append(derivative_field(grid, state.u, 1, boundary="neumann")[0])

    res = run(cfg.params, cfg.initial, cfg.control, cfg.T_end, cfg.grid, cfg.monitors, cfg.record_interval,
              on_record=keep)
    sup_ur = max(float(np.abs(f).max()) for f in fields)
    print(f"{res.event.kind.value}: {len(times)} records, max |u_r| = {sup_ur:.4f}")

    # sqrt(C~) = 10 s and k = 0.1, so each branch turns the angle by pi/6 starting from atan(-0.5) or
    # atan(0.5): the lower function stays in [-15.3 s, -5 s] and the upper in [5 s, 15.3 s].
    s = max(1.0, sup_ur / 1.5)
    lower = TangentCompSpec(0.01 / s, 0.0, 1.0 * s, -5.0 * s, direction=Direction.LOWER)
    upper = TangentCompSpec(0.01 / s, 0.0, 1.0 * s, 5.0 * s, direction=Direction.UPPER)
    print("user specs:", comparison_envelope_check(times, fields, lower, upper))
    control = TangentCompSpec(0.01 / s, 0.0, 1.0 * s, 5.0 * s, direction=Direction.LOWER)
    print("seed above u_r (control):", comparison_envelope_check(times, fields, control, None))

    r = res.records[0]
    built = lower_spec_from_bounds(res.sup_u, r.mu / cfg.params.n, r.mu, r.mu, cfg.params.p, cfg.params.q,
                                   cfg.params.chi, cfg.params.n, cfg.params.R, args.alpha1)
    print(f"bound-built lower spec: seed={built.seed:.4f} branch length={built.branch_length:.4f} "
          f"poles in first branch={pole_times(built, 1, 0)}")
    print("bound-built spec:", comparison_envelope_check(times, fields, built, None))


if __name__ == "__main__":
    main()
