"""Run the regime-atlas sweep at two job counts and confirm atlas.csv is byte-identical."""

from __future__ import annotations

import argparse
import tempfile
import time
from pathlib import Path

from flc.config import parse_config
from flc.sweep import run_sweep, write_atlas


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/atlas_sweep.json")
    ap.add_argument("--jobs", type=int, nargs=2, default=[1, 2])
    args = ap.parse_args()
    sweep = parse_config(args.config)
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for jobs in args.jobs:
            start = time.perf_counter()
            rows = run_sweep(sweep, jobs)
            out = Path(tmp) / f"jobs{jobs}"
            write_atlas(out, rows)
            outputs.append((out / "atlas.csv").read_bytes())
            print(f"jobs={jobs}: {len(rows)} points in {time.perf_counter() - start:.1f} s")
        print(outputs[0].decode(), end="")
    print("identical across job counts:", outputs[0] == outputs[1])


if __name__ == "__main__":
    main()
