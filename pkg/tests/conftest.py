import functools

import numpy as np
import pytest

from openbaker.quantum import closed_baker, open_baker
from openbaker.reflectivity import ReflectivityProfile
from openbaker.spectral import eigendecompose


@functools.lru_cache(maxsize=None)
def cached_open(N, shape, R):
    return open_baker(N, ReflectivityProfile(shape, R))


@functools.lru_cache(maxsize=None)
def cached_resonances(N, shape, R):
    return eigendecompose(cached_open(N, shape, R))


@pytest.fixture(scope="session")
def U243():
    return closed_baker(243)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS.values():
            terminalreporter.write_line(line)
