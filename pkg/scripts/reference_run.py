"""Run the subcritical reference configuration and report mass drift, floor ratio and runtime."""

from __future__ import annotations

import argparse
import time

from flc.config import parse_config
from flc.outputs import write_diagnostics_csv
from flc.simulate import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/reference.json")
    ap.add_argument("--out", default=None, help="optional path for diagnostics.csv")
    ap.add_argument("--N", type=int, nargs="*", default=[128, 256])
    args = ap.parse_args()
    cfg = parse_config(args.config)
    for N in args.N:
        start = time.perf_counter()
        res = run(cfg.params, cfg.initial, cfg.control, cfg.T_end, N, cfg.monitors, cfg.record_interval)
        elapsed = time.perf_counter() - start
        masses = [r.mass for r in res.records]
        drift = max(abs(m - masses[0]) for m in masses) / abs(masses[0])
        floor = min(r.floor_ratio for r in res.records)
        print(f"N={N:4d} {res.event.kind.value:<10} steps={res.history.steps:7d} "
              f"mass_drift={drift:.3e} floor_ratio_min={floor:.6f} sup_u={res.sup_u:.6f} time={elapsed:.2f}s")
        if args.out and N == args.N[0]:
            write_diagnostics_csv(args.out, res.records, cfg.monitors.energy_m)


if __name__ == "__main__":
    main()
