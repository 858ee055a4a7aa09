import numpy as np
import pytest

import heterosync as hs

LAPLACIAN = np.array([
    [7.0, -1.0, -2.0, -4.0],
    [-1.0, 3.0, -2.0, 0.0],
    [-2.0, -2.0, 7.0, -3.0],
    [-4.0, 0.0, -3.0, 7.0],
])

S_INIT = np.stack([
    np.zeros((3, 3)),
    np.array([[0.0, 2.0, 0.0], [0.0, 0.0, 2.0], [0.0, 0.0, 3.0]]),
    np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 2.0]]),
    np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]),
])

B = np.array([0.0, 0.0, 1.0])

P_FIXTURE = np.diag([0.10, 0.20, 2.3053])

ETA_FIXTURE = 0.6


@pytest.fixture(scope="session")
def example_spectrum():
    return hs.spectrum(LAPLACIAN)


@pytest.fixture(scope="session")
def example_design(example_spectrum):
    return hs.design_protocol(S_INIT, B, example_spectrum,
                              eta=ETA_FIXTURE, p_matrix=P_FIXTURE)


@pytest.fixture(scope="session")
def example_trajectory(example_spectrum, example_design):
    xi0 = hs.random_initial_states(4, 3, seed=0)
    return hs.run(LAPLACIAN, S_INIT, xi0, B, example_design, 100)


def config_dict(**overrides):
    """Baseline CLI configuration for the four-agent example."""
    adjacency = -LAPLACIAN.copy()
    np.fill_diagonal(adjacency, 0.0)
    cfg = {
        "name": "ex",
        "adjacency": adjacency.tolist(),
        "s_init": S_INIT.tolist(),
        "b": B.tolist(),
        "eta": ETA_FIXTURE,
        "p": P_FIXTURE.tolist(),
        "horizon": 60,
        "seed": 0,
    }
    cfg.update(overrides)
    return cfg
