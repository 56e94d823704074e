import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import schrodinger_lab as sl

settings.register_profile(
    "desk",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("desk")


def random_grid_vector(N: int, seed: int) -> sl.GridVector:
    rng = np.random.default_rng(seed)
    grid = sl.make_grid(N)
    vals = rng.standard_normal(grid.num_nodes) + 1j * rng.standard_normal(grid.num_nodes)
    return sl.GridVector(grid, vals)


def random_unit_spectral(N: int, seed: int) -> sl.SpectralVector:
    rng = np.random.default_rng(seed)
    grid = sl.make_grid(N)
    c = rng.standard_normal(grid.num_nodes) + 1j * rng.standard_normal(grid.num_nodes)
    return sl.SpectralVector(grid, c / np.sqrt(np.sum(np.abs(c) ** 2)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
