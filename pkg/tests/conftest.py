import pytest

from hhlab.exponents import ModelParams, SpaceIndex
from hhlab.fields import RadialField
from hhlab.grid import RadialGrid
from hhlab.semigroup import PropagatorCache
from hhlab.solver import SolverConfig, picard_iterate


@pytest.fixture(scope="session")
def cache():
    # one propagator cache for the whole run; menus are shared across tests
    return PropagatorCache()


@pytest.fixture(scope="session")
def grid3():
    return RadialGrid.log(3, 1e-3, 1e3, 512)


@pytest.fixture(scope="session")
def grid1():
    return RadialGrid.log(1, 1e-3, 1e3, 512)


@pytest.fixture(scope="session")
def params_fujita3():
    # d=3 cubic absorbing case used throughout the solver tests
    return ModelParams(d=3, gamma=0, alpha=3, a=-1)


@pytest.fixture(scope="session")
def solver_config():
    return SolverConfig(T=16.0, n_time=40, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)


@pytest.fixture(scope="session")
def selfsimilar_traj(params_fujita3, solver_config, grid3, cache):
    """Converged self-similar solution, shared by several test modules."""
    phi = RadialField.power(grid3, 0.05, 1.0)
    traj = picard_iterate(phi, params_fujita3, solver_config, cache=cache)
    assert traj.converged
    return traj
