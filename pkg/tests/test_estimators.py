import numpy as np
import pytest
from sklearn.base import clone

import heterosync as hs
from heterosync.exceptions import ArgumentError

from conftest import B, ETA_FIXTURE, LAPLACIAN, P_FIXTURE, S_INIT

ADJACENCY = -LAPLACIAN + np.diag(np.diag(LAPLACIAN))


def fitted_protocol(**kwargs):
    est = hs.SynchronizationProtocol(**kwargs)
    return est.fit(S_INIT, adjacency=ADJACENCY, b=B)


def test_protocol_get_set_params_roundtrip():
    est = hs.SynchronizationProtocol(eta=ETA_FIXTURE)
    params = est.get_params()
    assert params["eta"] == ETA_FIXTURE
    assert params["coupling"] is None
    est.set_params(coupling=0.13)
    assert est.get_params()["coupling"] == 0.13


def test_protocol_is_cloneable():
    est = hs.SynchronizationProtocol(eta=ETA_FIXTURE, riccati_p=P_FIXTURE)
    twin = clone(est)
    assert twin.get_params()["eta"] == ETA_FIXTURE


def test_protocol_fit_populates_design(example_design):
    est = fitted_protocol(eta=ETA_FIXTURE, riccati_p=P_FIXTURE)
    assert est.p_source_ == "supplied"
    assert est.coupling_ == pytest.approx(example_design.coupling)
    assert est.rate_bound_ == pytest.approx(example_design.rate_bound)
    assert np.allclose(est.limit_gain_, example_design.limit_gain)
    assert np.array_equal(est.s_infinity_, example_design.s_infinity)
    assert est.assumption_report_.all_hold


def test_protocol_fit_returns_self():
    est = hs.SynchronizationProtocol(eta=ETA_FIXTURE, riccati_p=P_FIXTURE)
    assert est.fit(S_INIT, adjacency=ADJACENCY, b=B) is est


def test_protocol_simulate_matches_functional_core(example_design,
                                                   example_trajectory):
    est = fitted_protocol(eta=ETA_FIXTURE, riccati_p=P_FIXTURE)
    traj = est.simulate(horizon=100, seed=0)
    assert np.array_equal(traj.sync_error, example_trajectory.sync_error)
    assert np.array_equal(traj.states, example_trajectory.states)


def test_protocol_simulate_accepts_explicit_initial_states():
    est = fitted_protocol(eta=ETA_FIXTURE, riccati_p=P_FIXTURE)
    xi0 = np.full((4, 3), 0.25)
    traj = est.simulate(xi_init=xi0, horizon=10)
    assert np.array_equal(traj.states[0], xi0)


def test_protocol_requires_fit_before_simulate():
    est = hs.SynchronizationProtocol()
    with pytest.raises(ArgumentError, match="fit"):
        est.simulate(horizon=5)


def test_decay_estimator_recovers_geometric():
    t = np.arange(90.0)
    y = 2.5 * 0.65**t
    est = hs.GeometricDecayEstimator().fit(t, y)
    assert est.rate_ == pytest.approx(0.65, abs=1e-10)
    assert est.amplitude_ == pytest.approx(2.5, rel=1e-10)
    assert est.residual_ < 1e-12
    pred = est.predict(t)
    assert np.allclose(pred, y, rtol=1e-8)


def test_decay_estimator_skips_floor_values():
    t = np.arange(200.0)
    y = np.maximum(0.5**t, 1e-25)
    est = hs.GeometricDecayEstimator().fit(t, y)
    assert est.rate_ == pytest.approx(0.5, abs=1e-10)
    assert est.n_points_ < 200


def test_decay_estimator_validates_shapes():
    est = hs.GeometricDecayEstimator()
    with pytest.raises(ArgumentError):
        est.fit(np.ones((3, 3)), np.ones(9))
    with pytest.raises(ArgumentError):
        est.fit(np.arange(5.0), np.ones(6))
    with pytest.raises(ArgumentError):
        est.fit(np.arange(5.0), np.zeros(5))


def test_decay_estimator_predict_requires_fit():
    with pytest.raises(ArgumentError, match="fit"):
        hs.GeometricDecayEstimator().predict(np.arange(4.0))


def test_decay_estimator_on_simulated_sync_error(example_trajectory):
    t = np.arange(101.0)
    est = hs.GeometricDecayEstimator().fit(t[20:61],
                                           example_trajectory.sync_error[20:61])
    assert 0.70 <= est.rate_ <= 0.90
