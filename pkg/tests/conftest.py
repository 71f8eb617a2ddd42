import numpy as np
import pytest

from quadnls.evolution import EvolveConfig, evolve
from quadnls.functionals import scale
from quadnls.ground_state import regrid, solve


@pytest.fixture(scope="session")
def gs5_small():
    """Cheap n=5 reference for unit tests."""
    return solve(5, 0.5, num_nodes=512, r_max=24.0)


@pytest.fixture(scope="session")
def gs5_default():
    """The acceptance-grade n=5, kappa=1/2 ground state (default grid)."""
    return solve(5, 0.5)


@pytest.fixture(scope="session")
def gs_evolution(gs5_default):
    """n=5 reference re-anchored on the roomier evolution grid."""
    gs = regrid(gs5_default, 16.0, 4096)
    assert gs.converged
    return gs


@pytest.fixture(scope="session")
def run_09(gs_evolution):
    """The conservation run: 0.9-scaled ground state, dt=1e-3, t_max=1."""
    data = scale(gs_evolution.pair(), 0.9, 1.0).materialized()
    cfg = EvolveConfig(kappa=0.5, dt=1e-3, t_max=1.0)
    with np.errstate(all="ignore"):
        return cfg, evolve(data, cfg)
