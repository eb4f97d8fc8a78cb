import numpy as np
import pytest

from mhdlab import CutoffPhi, Grid, SolverConfig, make_flow
from mhdlab.presets import make_initial_state


@pytest.fixture
def grid():
    return Grid(n_x=16, n_y=65, y_max=8.0)


@pytest.fixture
def fine_grid():
    return Grid(n_x=32, n_y=129, y_max=8.0)


@pytest.fixture
def tall_grid():
    # for norm oracles needing negligible truncation tails
    return Grid(n_x=32, n_y=401, y_max=20.0)


@pytest.fixture
def phi():
    return CutoffPhi(r0=1.0)


@pytest.fixture
def cfg():
    return SolverConfig(dt=2e-3, t_end=0.1, monitor_every=10)


@pytest.fixture
def floor_flow():
    return make_flow("constants", h0=0.5)


@pytest.fixture
def floor_state(fine_grid, phi, cfg):
    return make_initial_state("floor", fine_grid, phi, cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
