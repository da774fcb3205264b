import numpy as np
import pytest

from intervalcast.errors import BoundViolation, NegativeRange, ParseError
from intervalcast.series import (
    CenterRangeSeries,
    IntervalSeries,
    from_center_range,
    load_csv,
    to_center_range,
    write_csv,
)


class TestConversions:
    def test_degenerate_interval(self):
        cr = to_center_range(IntervalSeries(lower=[0.0], upper=[0.0]))
        assert cr.center[0] == 0.0 and cr.range[0] == 0.0

    def test_hand_values(self):
        cr = to_center_range(IntervalSeries(lower=[1258.86], upper=[1284.62]))
        assert cr.center[0] == pytest.approx(1271.74, abs=1e-12)
        assert cr.range[0] == pytest.approx(12.88, abs=1e-12)

    def test_two_point_series(self):
        cr = to_center_range(IntervalSeries(lower=[-1.0, 0.0], upper=[1.0, 4.0]))
        assert cr.center.tolist() == [0.0, 2.0]
        assert cr.range.tolist() == [1.0, 2.0]

    def test_from_center_range_hand(self):
        s = from_center_range(CenterRangeSeries(center=[1.0], range=[1.0]))
        assert s.lower[0] == 0.0 and s.upper[0] == 2.0

    def test_zero_roundtrip(self):
        s = from_center_range(CenterRangeSeries(center=[0.0], range=[0.0]))
        assert s.lower[0] == 0.0 and s.upper[0] == 0.0

    def test_negative_range_rejected(self):
        with pytest.raises(NegativeRange):
            CenterRangeSeries(center=[5.0], range=[-1.0])

    def test_roundtrip_random(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = rng.integers(1, 200)
            center = rng.normal(0, 100, n)
            halfwidth = rng.uniform(0, 50, n)
            s = from_center_range(CenterRangeSeries(center=center, range=halfwidth))
            back = to_center_range(s)
            np.testing.assert_allclose(back.center, center, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(back.range, halfwidth, rtol=1e-12, atol=1e-12)


class TestInvariants:
    def test_bound_violation(self):
        with pytest.raises(BoundViolation):
            IntervalSeries(lower=[2.0], upper=[1.0])

    def test_equal_bounds_allowed(self):
        s = IntervalSeries(lower=[1.0, 2.0], upper=[1.0, 3.0])
        assert len(s) == 2

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            IntervalSeries(lower=[1.0, 2.0], upper=[3.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            IntervalSeries(lower=[], upper=[])


class TestCsv:
    def test_ohlc_mapping(self, tmp_path):
        path = tmp_path / "spx.csv"
        path.write_text(
            "Date,Open,High,Low,Close\n"
            "2012-01-03,1258.86,1284.62,1258.86,1277.06\n"
            "2012-01-04,1277.03,1278.73,1268.10,1277.30\n"
        )
        s = load_csv(path, schema="ohlc")
        assert s.lower[0] == 1258.86 and s.upper[0] == 1284.62
        assert len(s) == 2

    def test_bounds_schema(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("t,lower,upper\n0,1.0,2.0\n1,3.0,4.0\n")
        s = load_csv(path, schema="bounds")
        assert s.lower.tolist() == [1.0, 3.0]
        assert s.upper.tolist() == [2.0, 4.0]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            load_csv(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("t,lower,upper\n")
        with pytest.raises(ParseError):
            load_csv(path)

    def test_low_above_high(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("date,high,low\n2012-01-03,1.0,2.0\n")
        with pytest.raises(BoundViolation):
            load_csv(path, schema="ohlc")

    def test_bad_number_reports_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,lower,upper\n0,1.0,2.0\n1,oops,4.0\n")
        with pytest.raises(ParseError, match="row 2"):
            load_csv(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,lo,hi\n0,1.0,2.0\n")
        with pytest.raises(ParseError):
            load_csv(path)

    def test_write_read_roundtrip(self, tmp_path):
        rng = np.random.default_rng(7)
        center = rng.normal(0, 1000, 40)
        s = from_center_range(CenterRangeSeries(center=center, range=rng.uniform(0, 5, 40)))
        path = tmp_path / "series.csv"
        write_csv(path, s, header_comments={"seed": 7})
        back = load_csv(path)
        # 17 significant digits round-trip doubles exactly
        np.testing.assert_array_equal(back.lower, s.lower)
        np.testing.assert_array_equal(back.upper, s.upper)
        assert path.read_text().startswith("# seed=7\n")

    def test_unknown_schema(self, tmp_path):
        with pytest.raises(ValueError):
            load_csv(tmp_path / "x.csv", schema="nope")
