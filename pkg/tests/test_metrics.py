import numpy as np
import pytest

from intervalcast.errors import LengthMismatch, ZeroDenominator
from intervalcast.metrics import (
    MetricTable,
    evaluate_interval,
    mae,
    mape,
    mde,
    mse,
    point_metrics,
    smape,
)


class TestPointMetrics:
    def test_perfect_prediction_is_zero(self):
        y = np.random.default_rng(0).normal(3, 1, 50)
        for fn in (mse, mae, mape, smape):
            assert fn(y, y) == 0.0

    def test_hand_values(self):
        assert mse([1.0], [3.0]) == 4.0
        assert mae([1.0], [3.0]) == 2.0
        assert mape([1.0], [3.0]) == 2.0
        assert smape([1.0], [3.0]) == 0.5

    def test_mape_zero_truth(self):
        with pytest.raises(ZeroDenominator, match="index 1"):
            mape([1.0, 0.0], [1.0, 1.0])

    def test_smape_on_zero_truth(self):
        assert smape([0.0], [1.0]) == 1.0

    def test_smape_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            smape([0.0], [0.0])

    def test_smape_within_unit_interval(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            y = rng.normal(0, 10, 20)
            yhat = rng.normal(0, 10, 20)
            assert 0.0 <= smape(y, yhat) <= 1.0

    def test_jensen_mae_below_rmse(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            y = rng.normal(0, 5, 30)
            yhat = rng.normal(0, 5, 30)
            assert mae(y, yhat) <= np.sqrt(mse(y, yhat)) + 1e-12

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            mse([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(LengthMismatch):
            mae([], [])


class TestMde:
    def test_perfect_prediction(self):
        c = np.array([1.0, 2.0])
        r = np.array([0.5, 0.25])
        assert mde(c, c, r, r) == 0.0

    def test_hand_value(self):
        # truth bounds (1, 2) i.e. center 1.5, range 0.5; prediction (0, 0):
        # bound errors (1, 2) -> inner sqrt((1+4)/2) -> MDE = 2.5**0.25
        value = mde([1.5], [0.0], [0.5], [0.0])
        assert value == pytest.approx(2.5 ** 0.25, abs=1e-9)
        assert value == pytest.approx(1.25743, abs=1e-5)

    def test_equals_bound_form(self):
        # same formula computed from reconstructed lower/upper bounds
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = rng.integers(1, 40)
            c, ch = rng.normal(0, 5, (2, n))
            r, rh = rng.uniform(0, 3, (2, n))
            lower, upper = c - r, c + r
            lower_h, upper_h = ch - rh, ch + rh
            inner = np.sqrt(((lower - lower_h) ** 2 + (upper - upper_h) ** 2) / 2.0)
            expected = np.sqrt(np.mean(inner))
            assert mde(c, ch, r, rh) == pytest.approx(expected, rel=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(4)
        c, ch = rng.normal(0, 5, (2, 25))
        r, rh = rng.uniform(0, 3, (2, 25))
        base = mde(c, ch, r, rh)
        shifted = mde(c + 100.0, ch + 100.0, r, rh)
        assert shifted == pytest.approx(base, rel=1e-9)

    def test_single_root_variant(self):
        # drops the outer root: T=1 value is sqrt(2.5) instead of 2.5**0.25
        value = mde([1.5], [0.0], [0.5], [0.0], variant="single_root")
        assert value == pytest.approx(np.sqrt(2.5), abs=1e-12)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            mde([1.0], [0.0], [1.0], [0.0], variant="other")

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            mde([1.0, 2.0], [0.0, 0.0], [1.0], [0.0])

    def test_negative_predictions_allowed(self):
        assert mde([1.0], [-2.0], [1.0], [-0.5]) > 0.0


class TestTable:
    def test_evaluate_interval(self):
        rng = np.random.default_rng(5)
        c, r = rng.normal(5, 1, 20), rng.uniform(1, 2, 20)
        table = evaluate_interval(c, c, r, r)
        assert table.mde == 0.0
        assert all(v == 0.0 for v in table.center.values())
        assert all(v == 0.0 for v in table.range.values())
        d = table.to_dict()
        assert set(d) == {"center", "range", "mde"}

    def test_nonnegativity_enforced(self):
        with pytest.raises(ValueError):
            MetricTable(center={"mse": -1.0}, range={}, mde=0.0)
        with pytest.raises(ValueError):
            MetricTable(center={}, range={}, mde=-0.1)

    def test_point_metrics_keys(self):
        y = np.array([1.0, 2.0])
        assert set(point_metrics(y, y)) == {"mse", "mae", "mape", "smape"}
