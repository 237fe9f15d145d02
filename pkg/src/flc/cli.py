"""Command-line entry point: simulate, sweep, verify, classify."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from .config import ConfigError, RunConfig, SweepConfig, parse_config
from .dynamics import EventKind
from .estimates import classify_regime, regime_threshold
from .outputs import write_diagnostics_csv, write_snapshot

log = logging.getLogger("flc")

EXIT_OK = 0
EXIT_BLOWUP = 2
EXIT_FAILURE = 3
EXIT_CONFIG = 4

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging() -> None:
    name = os.environ.get("FLC_LOG", "error").lower()
    level = _LOG_LEVELS.get(name, logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if name not in _LOG_LEVELS:
        log.error("FLC_LOG=%r not recognised, using 'error'", name)


def exit_code_for(kind: EventKind) -> int:
    if kind is EventKind.COMPLETED:
        return EXIT_OK
    if kind is EventKind.BLOW_UP:
        return EXIT_BLOWUP
    return EXIT_FAILURE


def simulate_command(cfg: RunConfig, out_dir: str | Path) -> int:
    from .grid import build_grid
    from .simulate import run

    out = Path(out_dir)
    snaps = out / "snapshots"
    snaps.mkdir(parents=True, exist_ok=True)
    grid = build_grid(cfg.grid)
    count = 0

    def on_record(state, ef, rec):
        nonlocal count
        write_snapshot(snaps / f"snap_{count:05d}.json", grid, state.t, state.u, ef)
        count += 1

    start = time.perf_counter()
    res = run(cfg.params, cfg.initial, cfg.control, cfg.T_end, cfg.grid, cfg.monitors, cfg.record_interval,
              on_record=on_record)
    write_diagnostics_csv(out / "diagnostics.csv", res.records, cfg.monitors.energy_m)
    ev = res.event
    print(f"{ev.kind.value} at t={ev.t_event!r} after {res.history.steps} steps "
          f"({time.perf_counter() - start:.2f} s); {ev.detail}")
    return exit_code_for(ev.kind)


def sweep_command(sweep: SweepConfig, out_dir: str | Path, jobs: int | None) -> int:
    from .sweep import run_sweep, write_atlas

    rows = run_sweep(sweep, jobs)
    write_atlas(out_dir, rows)
    counts: dict[str, int] = {}
    for r in rows:
        counts[r.outcome] = counts.get(r.outcome, 0) + 1
    print(f"{len(rows)} points: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
    return EXIT_OK


def verify_command() -> int:
    from .verify import format_table, run_all

    start = time.perf_counter()
    rows = run_all()
    print(format_table(rows))
    failed = [r for r in rows if r.failed]
    print(f"{len(rows)} rows, {len(failed)} failed, {time.perf_counter() - start:.1f} s")
    return EXIT_FAILURE if failed else EXIT_OK


def classify_command(p: float, q: float, n: int) -> int:
    label = classify_regime(p, q, n)
    print(f"{label.value} (threshold {regime_threshold(q, n):g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flc", description="Radial flux-limited chemotaxis experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one configuration")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)

    w = sub.add_parser("sweep", help="run a parameter sweep and write atlas.csv")
    w.add_argument("--config", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--jobs", type=int, default=None)

    sub.add_parser("verify", help="run the built-in residual and identity checks")

    c = sub.add_parser("classify", help="regime label for (p, q, n)")
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--q", type=float, required=True)
    c.add_argument("--n", type=int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = parse_config(args.config)
            if not isinstance(cfg, RunConfig):
                raise ConfigError("sweep", "simulate expects a run config, got a sweep")
            return simulate_command(cfg, args.out)
        if args.command == "sweep":
            cfg = parse_config(args.config)
            if not isinstance(cfg, SweepConfig):
                raise ConfigError("sweep", "is required for the sweep command")
            if args.jobs is not None and args.jobs < 1:
                raise ConfigError("--jobs", "must be a positive integer")
            return sweep_command(cfg, args.out, args.jobs)
        if args.command == "verify":
            return verify_command()
        if args.command == "classify":
            if args.p < 1 or args.q < 1 or args.n < 1:
                raise ConfigError("classify", "need p ≥ 1, q ≥ 1, n ≥ 1")
            return classify_command(args.p, args.q, args.n)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
