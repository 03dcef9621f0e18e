import numpy as np
import pytest

from sqopt import make_quadratic_family


@pytest.fixture(scope="session")
def toy():
    """Four equal-curvature 1-D quadratics: f(x) = x^2 + 5/2."""
    return make_quadratic_family([1, 1, 1, 1], [2, 1, -1, -2])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
