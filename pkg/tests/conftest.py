import numpy as np
import pytest
from hypothesis import settings

from ringflow.optimizer import minimize_transfer
from ringflow.state import ALPHA_OPT

settings.register_profile("ringflow", deadline=None, max_examples=60)
settings.load_profile("ringflow")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def optimum_9999():
    """Backflow-maximizing state at N = 9999 (matrix-free, a few seconds)."""
    return minimize_transfer(9999, ALPHA_OPT)
