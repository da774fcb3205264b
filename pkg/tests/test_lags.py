import numpy as np
import pytest

from intervalcast.errors import DegenerateSeries, OrderTooLarge, SegmentTooLong
from intervalcast.lags import (
    PINNED_ORDERS,
    acf,
    build_lag_dataset,
    pacf,
    segment,
    select_order,
)


def ar1(phi, n, seed):
    rng = np.random.default_rng(seed)
    e = rng.normal(0, 1, n)
    x = np.empty(n)
    y = 0.0
    for i in range(n):
        y = phi * y + e[i]
        x[i] = y
    return x


def acf_bruteforce(x, k):
    """Independent oracle: biased autocorrelation by explicit summation."""
    x = np.asarray(x, dtype=float)
    n = x.size
    m = x.mean()
    num = sum((x[t] - m) * (x[t + k] - m) for t in range(n - k))
    den = sum((x[t] - m) ** 2 for t in range(n))
    return num / den


class TestAcf:
    def test_lag_zero_is_one(self):
        x = np.random.default_rng(1).normal(0, 1, 100)
        assert acf(x, 5)[0] == 1.0

    def test_alternating_series(self):
        # r(1) = -(T-1)/T for +-1 alternation (biased estimator)
        x = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
        r = acf(x, 2)
        assert r[1] == pytest.approx(-5.0 / 6.0, abs=1e-15)
        assert r[1] == pytest.approx(acf_bruteforce(x, 1), abs=1e-12)

    def test_matches_bruteforce(self):
        x = np.random.default_rng(3).normal(0, 2, 80)
        r = acf(x, 6)
        for k in range(7):
            assert r[k] == pytest.approx(acf_bruteforce(x, k), abs=1e-12)

    def test_ar1_monte_carlo(self):
        x = ar1(0.5, 10000, seed=0)
        r = acf(x, 5)
        for k in range(1, 6):
            assert abs(r[k] - 0.5 ** k) < 0.05

    def test_within_unit_interval(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            x = rng.normal(0, 1, rng.integers(30, 200))
            r = acf(x, 10)
            assert np.all(r >= -1.0 - 1e-12) and np.all(r <= 1.0 + 1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSeries):
            acf(np.ones(50), 5)

    def test_max_lag_too_large(self):
        with pytest.raises(ValueError):
            acf(np.arange(5.0), 5)


class TestPacf:
    def test_first_partial_equals_acf(self):
        x = np.random.default_rng(2).normal(0, 1, 200)
        assert pacf(x, 6)[1] == acf(x, 6)[1]

    def test_ar1_cutoff(self):
        x = ar1(0.5, 10000, seed=0)
        p = pacf(x, 5)
        assert abs(p[1] - 0.5) < 0.05
        for k in range(2, 6):
            assert abs(p[k]) < 0.05

    def test_white_noise_band(self):
        x = np.random.default_rng(0).normal(0, 1, 10000)
        p = pacf(x, 20)
        assert np.all(np.abs(p[1:]) < 1.5 * 2.0 / np.sqrt(10000))

    def test_ar2_recovers_second_coefficient(self):
        # AR(2): pacf(2) estimates the lag-2 coefficient
        rng = np.random.default_rng(8)
        e = rng.normal(0, 1, 20000)
        x = np.empty(20000)
        y1 = y2 = 0.0
        for i in range(20000):
            y = 0.5 * y1 - 0.3 * y2 + e[i]
            y2, y1 = y1, y
            x[i] = y
        p = pacf(x, 4)
        assert abs(p[2] - (-0.3)) < 0.05


class TestSelectOrder:
    def test_white_noise_selects_one(self):
        # seed chosen so no partial exceeds the band (verified by the oracle)
        x = np.random.default_rng(0).normal(0, 1, 2000)
        band = 1.96 / np.sqrt(2000)
        assert np.all(np.abs(pacf(x, 10)[1:]) <= band)  # oracle
        assert select_order(x, 10) == 1

    def test_ar1_selects_one(self):
        x = ar1(0.8, 5000, seed=0)
        band = 1.96 / np.sqrt(5000)
        p = pacf(x, 8)
        assert abs(p[1]) > band and np.all(np.abs(p[2:]) <= band)  # oracle
        assert select_order(x, 8) == 1

    def test_largest_significant_wins(self):
        # AR(2) has two significant partials; the rule returns the larger lag
        rng = np.random.default_rng(4)
        e = rng.normal(0, 1, 20000)
        x = np.empty(20000)
        y1 = y2 = 0.0
        for i in range(20000):
            y = 0.5 * y1 - 0.3 * y2 + e[i]
            y2, y1 = y1, y
            x[i] = y
        band = 1.96 / np.sqrt(20000)
        p = pacf(x, 3)
        assert abs(p[2]) > band and abs(p[3]) <= band  # oracle for this seed
        assert select_order(x, 3) == 2

    def test_pin_overrides(self):
        x = np.random.default_rng(0).normal(0, 1, 500)
        assert select_order(x, 10, pin=35) == 35

    def test_pinned_replication_orders(self):
        assert PINNED_ORDERS == {
            "sp500": (35, 35),
            "c1": (5, 3),
            "c2": (25, 5),
            "c3": (5, 5),
        }

    def test_degenerate(self):
        with pytest.raises(DegenerateSeries):
            select_order(np.zeros(100), 5)


class TestLagDataset:
    def test_hand_example(self):
        d = build_lag_dataset([1.0, 2.0, 3.0, 4.0], 2)
        assert d.windows.tolist() == [[1.0, 2.0], [2.0, 3.0]]
        assert d.targets.tolist() == [3.0, 4.0]

    def test_boundary_single_pair(self):
        d = build_lag_dataset(np.arange(4.0), 3)
        assert d.targets.size == 1
        assert d.windows.tolist() == [[0.0, 1.0, 2.0]]

    def test_order_too_large(self):
        with pytest.raises(OrderTooLarge):
            build_lag_dataset(np.arange(4.0), 4)

    def test_count_and_no_overlap(self):
        x = np.random.default_rng(6).normal(0, 1, 60)
        d = build_lag_dataset(x, 7)
        assert d.targets.size == 60 - 7
        for j in range(d.targets.size):
            # window j holds x[j..j+6]; its target is x[j+7]
            np.testing.assert_array_equal(d.windows[j], x[j:j + 7])
            assert d.targets[j] == x[j + 7]


class TestSegment:
    def test_remainder_dropped(self):
        s = segment(np.arange(100.0), 30)
        assert len(s) == 3

    def test_exact_division(self):
        s = segment(np.arange(60.0), 30)
        assert len(s) == 2
        assert s.segments.size == 60

    def test_dgp_scale(self):
        s = segment(np.arange(1500.0), 45)
        assert len(s) == 33

    def test_too_long(self):
        with pytest.raises(SegmentTooLong):
            segment(np.arange(10.0), 11)

    def test_minimum_length(self):
        with pytest.raises(ValueError):
            segment(np.arange(10.0), 1)

    def test_concatenate_identity(self):
        x = np.random.default_rng(9).normal(0, 1, 101)
        s = segment(x, 25)
        np.testing.assert_array_equal(s.segments.ravel(), x[:100])
