"""Model parameters for the radial flux-limited chemotaxis problem."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Exponents p (diffusion) and q (chemotaxis), sensitivity chi, ball B_R in R^n."""

    p: float
    q: float
    chi: float
    n: int
    R: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.p) or self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not np.isfinite(self.q) or self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not np.isfinite(self.chi) or self.chi <= 0:
            raise ValueError(f"chi must be > 0, got {self.chi}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not np.isfinite(self.R) or self.R <= 0:
            raise ValueError(f"R must be > 0, got {self.R}")
