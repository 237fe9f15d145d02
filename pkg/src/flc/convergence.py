"""Residual reports and observed convergence orders for refinement studies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ResidualReport:
    """Errors at successive refinement levels (coarse to fine).

    ``linf``/``l2`` are the finest-level values; ``observed_order`` is the
    smallest pairwise log2 ratio across consecutive levels.
    """

    linf: float
    l2: float
    observed_order: float
    interior_only: bool
    levels: tuple[int, ...] = ()
    linf_by_level: tuple[float, ...] = ()
    orders: tuple[float, ...] = ()
    label: str = ""


def observed_orders(errors: Sequence[float], ratio: float = 2.0) -> tuple[float, ...]:
    out = []
    for coarse, fine in zip(errors[:-1], errors[1:]):
        if fine == 0.0:
            out.append(math.inf)
        else:
            out.append(math.log(coarse / fine) / math.log(ratio))
    return tuple(out)


def weighted_l2(values: np.ndarray, weights: np.ndarray) -> float:
    total = float(np.sum(weights))
    if total == 0.0:
        return 0.0
    return math.sqrt(float(np.sum(weights * values * values)) / total)


def build_report(
    levels: Sequence[int],
    linf: Sequence[float],
    l2: Sequence[float],
    interior_only: bool = True,
    label: str = "",
) -> ResidualReport:
    orders = observed_orders(linf)
    return ResidualReport(
        linf=float(linf[-1]),
        l2=float(l2[-1]),
        observed_order=min(orders) if orders else math.nan,
        interior_only=interior_only,
        levels=tuple(int(n) for n in levels),
        linf_by_level=tuple(float(e) for e in linf),
        orders=orders,
        label=label,
    )
