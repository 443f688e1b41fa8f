import numpy as np
import pytest

from midint.base import BigUint


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def random_biguint(rng):
    def make(m, width_bits=64):
        return BigUint.random(m, width_bits, rng)
    return make


def pytest_configure(config):
    config.addinivalue_line('markers',
                            'slow: full-size cases, deselect with -m "not slow"')
