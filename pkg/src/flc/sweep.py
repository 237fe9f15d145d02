"""Parameter sweeps: independent runs in worker processes, gathered into a sorted atlas."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import RunConfig, SweepConfig
from .dynamics import EventKind
from .estimates import classify_regime
from .outputs import fmt_float
from .simulate import run

log = logging.getLogger(__name__)

ATLAS_COLUMNS = ("p", "q", "chi", "n", "amplitude", "regime", "outcome", "sup_max_u", "t_final", "steps", "event")


@dataclass(frozen=True)
class AtlasRow:
    point: tuple
    regime: str
    outcome: str  # completed | blowup | failed
    sup_max_u: float
    t_final: float
    steps: int
    event: str
    runtime_s: float

    def cells(self) -> list[str]:
        p, q, chi, n, amplitude = self.point
        return [
            fmt_float(p), fmt_float(q), fmt_float(chi), str(n), fmt_float(amplitude),
            self.regime, self.outcome, fmt_float(self.sup_max_u), fmt_float(self.t_final),
            str(self.steps), self.event,
        ]


def run_point(point: tuple, cfg: RunConfig) -> AtlasRow:
    p, q, _, n, _ = point
    regime = classify_regime(p, q, n).value
    start = time.perf_counter()
    try:
        res = run(cfg.params, cfg.initial, cfg.control, cfg.T_end, cfg.grid, cfg.monitors, cfg.record_interval)
    except Exception as exc:  # a broken point is recorded, the sweep goes on
        log.warning("sweep point %s failed: %s", point, exc)
        return AtlasRow(point, regime, "failed", math.nan, math.nan, 0, type(exc).__name__,
                        time.perf_counter() - start)
    kind = res.event.kind
    outcome = {EventKind.COMPLETED: "completed", EventKind.BLOW_UP: "blowup"}.get(kind, "failed")
    return AtlasRow(point, regime, outcome, res.sup_u, res.final_state.t, res.history.steps, kind.value,
                    time.perf_counter() - start)


def _run_indexed(args):
    point, cfg = args
    return run_point(point, cfg)


def run_sweep(sweep: SweepConfig, jobs: int | None = None) -> list[AtlasRow]:
    jobs = sweep.jobs if jobs is None else jobs
    tasks = [(pt, sweep.config_for(pt)) for pt in sweep.points()]
    log.info("sweep: %d points on %d workers", len(tasks), jobs)
    if jobs <= 1:
        rows = [_run_indexed(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_indexed, tasks))
    return sorted(rows, key=lambda r: r.point)


def write_atlas(out_dir: str | Path, rows: list[AtlasRow]) -> None:
    """atlas.csv holds only deterministic columns; wall-clock times go to timings.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = [",".join(ATLAS_COLUMNS)] + [",".join(r.cells()) for r in rows]
    (out / "atlas.csv").write_text("\n".join(lines) + "\n")
    timing = ["p,q,chi,n,amplitude,runtime_s"]
    timing += [",".join(r.cells()[:5] + [f"{r.runtime_s:.3f}"]) for r in rows]
    (out / "timings.csv").write_text("\n".join(timing) + "\n")
