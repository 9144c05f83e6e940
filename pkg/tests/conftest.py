import numpy as np
import pytest

from spue import CostParams, FundamentalDiagram, jam_density


@pytest.fixture
def canonical():
    """beta = gamma = C = 1, N = 2, t* = upsilon0 = 0: kappa = 2, L* = 1."""
    return CostParams(alpha=2.0, beta=1.0, gamma=1.0, t_star=0.0, upsilon0=0.0, capacity=1.0, demand_total=2.0)


@pytest.fixture
def arnott():
    return CostParams(alpha=6.4, beta=3.9, gamma=15.21, t_star=9.0, upsilon0=0.5, capacity=1.0, demand_total=1.0)


@pytest.fixture
def fd_canonical(canonical):
    return FundamentalDiagram(1.0, 1.0, jam_density(canonical))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
