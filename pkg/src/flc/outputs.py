"""Diagnostics CSV and profile snapshot JSON."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .elliptic import EllipticFields
from .grid import RadialGrid
from .simulate import DiagnosticsRecord

BASE_COLUMNS = (
    "t", "dt", "mass", "mu", "min_u", "max_u", "max_abs_ur", "max_z_plus",
    "floor_ratio", "vr_margin_min", "ur_over_1_plus_zplus",
)


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(x))


def lm_column(m: float) -> str:
    return f"lm_{fmt_float(m)}"


def diagnostics_header(energy_m: Sequence[float]) -> list[str]:
    return [*BASE_COLUMNS, *(lm_column(m) for m in sorted(energy_m)), "event_flag"]


def diagnostics_row(rec: DiagnosticsRecord, energy_m: Sequence[float]) -> list[str]:
    cells = [fmt_float(getattr(rec, c)) for c in BASE_COLUMNS]
    cells += [fmt_float(rec.lm_norms[m]) for m in sorted(energy_m)]
    cells.append(rec.event_flag)
    return cells


def write_diagnostics_csv(path: str | Path, records: Iterable[DiagnosticsRecord], energy_m: Sequence[float]) -> None:
    lines = [",".join(diagnostics_header(energy_m))]
    lines += [",".join(diagnostics_row(r, energy_m)) for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def snapshot_dict(grid: RadialGrid, t: float, u: np.ndarray, ef: EllipticFields) -> dict:
    return {
        "t": float(t),
        "grid": {"n": grid.n, "R": float(grid.R), "N": grid.N},
        "u": [float(x) for x in u],
        "vr": [float(x) for x in ef.vr_face],
        "vrr": [float(x) for x in ef.vrr_cell],
    }


def write_snapshot(path: str | Path, grid: RadialGrid, t: float, u: np.ndarray, ef: EllipticFields) -> None:
    Path(path).write_text(json.dumps(snapshot_dict(grid, t, u, ef)) + "\n")


def read_snapshot(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
