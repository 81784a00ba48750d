import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wellkit.fixtures import four_crossing_map

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def fig1():
    return four_crossing_map()


def random_values(seed: int, n: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-1.0, 1.0, n)
