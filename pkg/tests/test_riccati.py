import numpy as np
import pytest

import heterosync as hs
from heterosync.exceptions import (ArgumentError, AssumptionError,
                                   ConvergenceError)

from conftest import B, ETA_FIXTURE, P_FIXTURE

S_AVG = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.5]])


def fixture_problem(eta=ETA_FIXTURE):
    return hs.RiccatiProblem(dynamics=S_AVG, input=B, eta=eta)


def test_lhs_matches_hand_arithmetic():
    # S'PS for diagonal P and this S has only three nonzero entries:
    # (2,2) = p1, (3,3) = p2 + 2.25*p3, and B'PB = p3, B'PS = [0, 0, 1.5*p3]
    p1, p2, p3 = 0.10, 0.20, 2.3053
    coef = 1.0 - ETA_FIXTURE**2
    expected = np.diag([
        p1,
        p2 - p1,
        p3 - (p2 + 2.25 * p3) + coef * (1.5 * p3) ** 2 / p3,
    ])
    lhs = hs.riccati_lhs(P_FIXTURE, S_AVG, B, ETA_FIXTURE)
    assert np.max(np.abs(lhs - expected)) < 1e-12


def test_fixture_witness_verifies():
    passed, min_eig = hs.verify_riccati(P_FIXTURE, fixture_problem())
    assert passed
    assert min_eig == pytest.approx(0.1, abs=1e-6)


def test_witness_scaling_invariance():
    prob = fixture_problem()
    _, base = hs.verify_riccati(P_FIXTURE, prob)
    for alpha in (10.0, 0.1):
        passed, min_eig = hs.verify_riccati(alpha * P_FIXTURE, prob)
        assert passed
        assert min_eig == pytest.approx(alpha * base, rel=1e-9)


def test_lhs_min_eig_grows_with_coefficient():
    # the rank-one term is PSD, so shrinking eta can only raise the floor
    etas = [0.9, 0.7, 0.5, 0.3]
    floors = [np.linalg.eigvalsh(hs.riccati_lhs(P_FIXTURE, S_AVG, B, e))[0]
              for e in etas]
    assert all(b - a >= -1e-12 for a, b in zip(floors, floors[1:]))


def test_verify_rejects_indefinite_p():
    passed, _ = hs.verify_riccati(np.diag([1.0, -1.0, 1.0]), fixture_problem())
    assert not passed


def test_verify_rejects_infeasible_eta():
    # eta above the inverse unstable product: no witness can exist
    passed, _ = hs.verify_riccati(P_FIXTURE, fixture_problem(eta=0.9))
    assert not passed


def test_eta_bound_is_inverse_unstable_product():
    assert fixture_problem().eta_bound() == pytest.approx(1.0 / 1.5)


def test_solver_produces_verified_witness():
    witness = hs.solve_modified_riccati(fixture_problem())
    passed, min_eig = hs.verify_riccati(witness.p_matrix, fixture_problem())
    assert passed
    assert witness.iterations > 0
    assert witness.residual_min_eig == pytest.approx(min_eig, rel=1e-9)


def test_solver_scalar_fixed_point_closed_form():
    # scalar map p -> eta^2 s^2 p + shift has fixed point shift/(1 - eta^2 s^2)
    s, eta = 1.2, 0.6
    shift = 1e-2 * s**2
    expected = shift / (1.0 - eta**2 * s**2)
    witness = hs.solve_modified_riccati(
        hs.RiccatiProblem(dynamics=np.array([[s]]), input=np.array([1.0]), eta=eta))
    assert witness.p_matrix[0, 0] == pytest.approx(expected, rel=1e-8)


def test_solver_rejects_eta_at_bound():
    with pytest.raises(AssumptionError):
        hs.solve_modified_riccati(fixture_problem(eta=1.0 / 1.5))


def test_solver_diverges_without_stabilizability():
    prob = hs.RiccatiProblem(dynamics=np.diag([2.0, 0.5]),
                             input=np.array([0.0, 1.0]), eta=0.4)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(ConvergenceError):
            hs.solve_modified_riccati(prob, max_iter=600)


def test_problem_validates_eta_range():
    with pytest.raises(ArgumentError):
        hs.RiccatiProblem(dynamics=S_AVG, input=B, eta=1.0)
    with pytest.raises(ArgumentError):
        hs.RiccatiProblem(dynamics=S_AVG, input=B, eta=-0.1)


def test_lhs_rejects_degenerate_input_direction():
    with pytest.raises(ArgumentError):
        hs.riccati_lhs(np.diag([1.0, 1.0, 0.0]), S_AVG, B, 0.5)
