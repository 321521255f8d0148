import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
sys.path.insert(0, os.path.dirname(__file__))

from qlq import linalg2
from qlq.field_tower import reset_fresh_names


@pytest.fixture(autouse=True)
def _deterministic_session():
    """Fresh naming counters and rank-call seeds for every test."""
    reset_fresh_names()
    linalg2.reset_call_counter()
    linalg2.set_default_mode(linalg2.RankMode.montecarlo(trials=2, k=32, seed=0))
    yield


@pytest.fixture
def xy_tower():
    from qlq.field_tower import rational_tower

    return rational_tower(["x", "y"])


@pytest.fixture
def xyz_tower():
    from qlq.field_tower import rational_tower

    return rational_tower(["x", "y", "z"])
