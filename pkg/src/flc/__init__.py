"""Radial flux-limited chemotaxis: discretisation, identities, comparison functions and experiments."""

from .grid import GridSpec, RadialGrid, build_grid
from .params import ModelParams

__all__ = ["GridSpec", "RadialGrid", "build_grid", "ModelParams"]
__version__ = "0.1.0"
