import numpy as np
import pytest

import heterosync as hs
from heterosync.exceptions import ArgumentError


def test_estimate_recovers_exact_geometric():
    t = np.arange(80)
    for c in (1.0, 3.7, 2e-4):
        for r in (0.3, 0.52, 0.9):
            est = hs.estimate_rate(c * r**t)
            assert est.rate == pytest.approx(r, abs=1e-10)
            assert est.residual < 1e-12
            # fast decay reaches the relative floor early; those points
            # are excluded rather than fit
            if r == 0.9:
                assert est.n_points == 80
            else:
                assert 5 <= est.n_points < 80


def test_estimate_window_is_half_open():
    t = np.arange(50)
    est = hs.estimate_rate(0.8**t, window=(10, 20))
    assert est.window == (10, 20)
    assert est.n_points == 10
    assert est.rate == pytest.approx(0.8, abs=1e-10)


def test_estimate_ignores_underflow_floor():
    t = np.arange(150)
    series = np.maximum(0.5**t, 1e-20)
    est = hs.estimate_rate(series)
    assert est.rate == pytest.approx(0.5, abs=1e-10)
    assert est.n_points < 150


def test_estimate_rejects_bad_windows():
    series = 0.8 ** np.arange(30)
    with pytest.raises(ArgumentError):
        hs.estimate_rate(series, window=(20, 10))
    with pytest.raises(ArgumentError):
        hs.estimate_rate(series, window=(0, 99))
    with pytest.raises(ArgumentError):
        hs.estimate_rate(series, window=(0, 4))


def test_estimate_rejects_all_nonpositive():
    with pytest.raises(ArgumentError):
        hs.estimate_rate(np.zeros(20))


def test_estimate_tolerates_mild_noise():
    rng = np.random.default_rng(19)
    t = np.arange(100)
    series = 0.75**t * np.exp(rng.normal(scale=0.01, size=100))
    est = hs.estimate_rate(series)
    assert est.rate == pytest.approx(0.75, abs=0.01)


def test_ratio_series_exact_division():
    t = np.arange(60)
    series = 3.0 * 0.8**t
    ratios = hs.ratio_series(series, 0.8)
    assert np.allclose(ratios, 3.0, rtol=1e-14)
    with pytest.raises(ArgumentError):
        hs.ratio_series(series, 1.0)


def test_tail_monotone_directions():
    down = 0.9 ** np.arange(100)
    assert hs.tail_monotone(down, "decreasing")
    assert not hs.tail_monotone(down, "increasing")
    assert hs.tail_monotone(down[::-1], "increasing")


def test_tail_monotone_allows_plateaus():
    series = np.concatenate([0.5 ** np.arange(50), np.full(50, 1e-16)])
    assert hs.tail_monotone(series, "decreasing")


def test_tail_monotone_violation_budget():
    series = 0.9 ** np.arange(200).astype(float)
    bumped = series.copy()
    bumped[190] *= 1.5  # one bump in a 60-point tail stays within 5%
    assert hs.tail_monotone(bumped, "decreasing")
    for i in range(150, 200, 5):
        bumped[i] *= 1.5
    assert not hs.tail_monotone(bumped, "decreasing")


def test_tail_monotone_validates_arguments():
    with pytest.raises(ArgumentError):
        hs.tail_monotone(np.ones(10), "sideways")
    with pytest.raises(ArgumentError):
        hs.tail_monotone(np.ones(1))


def test_monotone_consistency_across_rates(example_trajectory):
    # if the ratio to r1**t trends down, the ratio to any larger r2 does too
    sync = example_trajectory.sync_error
    for r1, r2 in ((0.85, 0.9), (0.9, 0.95)):
        if hs.tail_monotone(hs.ratio_series(sync, r1), "decreasing"):
            assert hs.tail_monotone(hs.ratio_series(sync, r2), "decreasing")


def test_estimated_rate_respects_guaranteed_bound(example_design,
                                                  example_trajectory):
    # any certified rate above the design bound dominates the tail estimate
    est = hs.estimate_rate(example_trajectory.sync_error, window=(50, 101))
    assert est.rate >= example_design.rate_bound - 0.02
    for r in (0.80, 0.85, 0.90):
        assert r > example_design.rate_bound
        assert est.rate <= r
