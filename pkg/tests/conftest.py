import numpy as np
import pytest

from propring.algebra import group_algebra
from propring.config import PrimeConfig
from propring.groups import group_model


@pytest.fixture(scope="session", params=("GL2", "QUAT"))
def case(request):
    return request.param


@pytest.fixture(scope="session")
def cfg(case):
    return PrimeConfig(5, 1, 2, case, N=1)


@pytest.fixture(scope="session")
def model(cfg):
    return group_model(cfg)


@pytest.fixture(scope="session")
def alg(cfg):
    return group_algebra(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20250825)
