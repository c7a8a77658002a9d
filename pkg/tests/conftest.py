import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def sorted_config(rng, n, spread=2.0):
    x = np.sort(rng.uniform(-spread, spread, n))
    while np.any(np.diff(x) <= 0):
        x = np.sort(rng.uniform(-spread, spread, n))
    return x
