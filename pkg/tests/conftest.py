import numpy as np
import pytest

from kdv5.spectral import Grid, sobolev_norm
from kdv5.fields import gaussian_field, random_field


@pytest.fixture
def grid_2pi():
    return Grid(2 * np.pi, 64)


@pytest.fixture
def grid_small():
    return Grid(12.0, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def small_random(grid, rng, target=0.05, mode_max=None):
    return random_field(grid, rng, target, mode_max=mode_max)


def small_gaussian(grid, target=0.05, width=1.5):
    q = gaussian_field(grid, 1.0, width)
    return q * (target / sobolev_norm(q, -1.0, 1.0))
