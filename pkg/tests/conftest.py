import numpy as np
import pytest

from torusmhd.grid import make_grid


@pytest.fixture(scope="session")
def grid2():
    return make_grid(2, 16)


@pytest.fixture(scope="session")
def grid3():
    return make_grid(3, 12)


@pytest.fixture(scope="session")
def grid4():
    return make_grid(4, 12)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
