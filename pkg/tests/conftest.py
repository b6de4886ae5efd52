"""
공통 fixture: ω ≡ 0 경로, seed 경로, 기본 계수
"""
import math

import pytest

from pbl.services.coefficients import make_beta, make_gamma
from pbl.services.quadrature import QuadratureSpec
from pbl.services.wiener import TimeGrid, sample_path, zero_path

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def zero_grid():
    return TimeGrid.span(-300.0, 300.0, 0.01)


@pytest.fixture(scope="session")
def omega_zero(zero_grid):
    return zero_path(zero_grid)


@pytest.fixture(scope="session")
def small_grid():
    return TimeGrid.span(-60.0, 20.0, 1e-3)


@pytest.fixture(scope="session")
def omega7(small_grid):
    return sample_path(7, small_grid)


@pytest.fixture
def beta_one():
    return make_beta("constant", {"b": 1.0})


@pytest.fixture
def beta_periodic():
    return make_beta("periodic", {"a": 2.0, "b": 1.0, "T": TWO_PI})


@pytest.fixture
def gamma_zero():
    return make_gamma("zero")


@pytest.fixture
def tight():
    return QuadratureSpec(rel_tol=1e-12)
