import numpy as np
import pytest

from causnet.core import TimeSeriesSet, standardize
from causnet.systems import gen_henon


@pytest.fixture(scope="session")
def henon5():
    """One standardized realization of the 5-map chain at C=0.2, n=512."""
    ts, graph = gen_henon(5, 0.2, 512, seed=42)
    return standardize(ts), graph


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


@pytest.fixture()
def white_noise():
    def make(n=1024, K=4, seed=0):
        return standardize(TimeSeriesSet(np.random.default_rng(seed).standard_normal((n, K))))

    return make
