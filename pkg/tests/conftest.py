from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"
ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def oracles() -> dict:
    """Values frozen by scripts/freeze_oracles.py (sympy, independent of the package)."""
    return json.loads((DATA / "oracles.json").read_text())


@pytest.fixture(scope="session")
def root() -> Path:
    return ROOT
