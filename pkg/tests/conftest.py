"""Shared pytest configuration for pvpop tests."""

import pytest

from pvpop.design import DesignSpec, posterior_superiority_matrix
from pvpop.kernels import Sampler


@pytest.fixture
def sampler():
    """Fresh seeded stream for Monte Carlo oracles."""
    return Sampler(20240517)


@pytest.fixture(scope="session")
def large_design():
    """n = 500 design shared by the enumeration-heavy checks."""
    return DesignSpec(alpha=0.05, target_power=0.9, p_S=0.2, p_E_alt=0.35, n=500)


@pytest.fixture(scope="session")
def large_matrix(large_design):
    """Posterior superiority matrix at n = 500, computed once per session."""
    return posterior_superiority_matrix(
        large_design.n, large_design.priors, large_design.quadrature_order
    )
