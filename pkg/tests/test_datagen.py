import math
from dataclasses import replace

import numpy as np
import pytest

from didrn.datagen import SyntheticConfig, daily_profile, generate, load_csv, resample, write_csv
from didrn.exceptions import DataError
from didrn.pipeline import TimeSeries


def test_length():
    assert len(generate(SyntheticConfig(days=14, interval_minutes=10))) == 2016
    assert len(generate(SyntheticConfig(days=61))) == 8784


def test_deterministic():
    cfg = SyntheticConfig(days=3, seed=42)
    np.testing.assert_array_equal(generate(cfg).values, generate(cfg).values)
    assert not np.array_equal(generate(cfg).values, generate(replace(cfg, seed=43)).values)


def test_pure_daily_periodicity():
    s = generate(SyntheticConfig(days=9, noise_std=0, weekend_factor=1.0))
    np.testing.assert_array_equal(s.values[:-144], s.values[144:])


def test_profile_matches_closed_form():
    cfg = SyntheticConfig(days=1, noise_std=0)
    s = generate(cfg)  # 2013-06-01 is a Saturday
    h = 7.5
    expected = cfg.weekend_factor * (
        400 + 600 * math.exp(-((h - 8) ** 2) / 8) + 500 * math.exp(-((h - 18) ** 2) / 8)
    )
    assert s.values[45] == pytest.approx(expected, rel=1e-12)


def test_weekend_attenuation():
    cfg = SyntheticConfig(days=7, noise_std=0, start=SyntheticConfig().start)
    v = generate(cfg).values.reshape(7, 144)
    # Sat, Sun first; Mon..Fri after
    np.testing.assert_allclose(v[0], 0.7 * v[2])
    np.testing.assert_allclose(v[1], 0.7 * v[6])


def test_level_shift_and_nonnegative():
    cfg = SyntheticConfig(days=2, noise_std=0, level_shift=(100, 50.0))
    base = generate(replace(cfg, level_shift=None)).values
    v = generate(cfg).values
    np.testing.assert_allclose(v[100:] - base[100:], 50.0)
    np.testing.assert_array_equal(v[:100], base[:100])
    assert generate(SyntheticConfig(days=2, base_flow=0, noise_std=500)).values.min() >= 0


def test_interval_must_divide_day():
    with pytest.raises(DataError):
        SyntheticConfig(interval_minutes=7)


class TestResample:
    def test_paper_length(self):
        s = TimeSeries(np.arange(8784.0))
        out = resample(s, 6, "sum")
        assert len(out) == 1464 and out.interval_minutes == 60

    @pytest.mark.parametrize("mode", ["sum", "subsample"])
    def test_stride_one_identity(self, mode):
        s = TimeSeries([3.0, 1.0, 4.0, 1.0, 5.0])
        np.testing.assert_array_equal(resample(s, 1, mode).values, s.values)

    def test_sum_example(self):
        np.testing.assert_array_equal(resample(TimeSeries([1.0, 2.0, 3.0, 4.0]), 2).values, [3, 7])

    def test_lengths_and_conservation(self):
        s = TimeSeries(np.random.default_rng(0).uniform(0, 100, 103))
        summed = resample(s, 10, "sum")
        assert len(summed) == 10 and len(resample(s, 10, "subsample")) == 11
        assert summed.values.sum() == pytest.approx(s.values[:100].sum(), rel=1e-12)

    def test_bad_stride(self):
        with pytest.raises(DataError):
            resample(TimeSeries([1.0]), 0)


class TestCsv:
    def test_round_trip(self, tmp_path):
        s = generate(SyntheticConfig(days=2, seed=5))
        write_csv(s, tmp_path / "s.csv")
        back = load_csv(tmp_path / "s.csv")
        np.testing.assert_array_equal(back.values, s.values)
        assert back.interval_minutes == 10 and back.start_timestamp == s.start_timestamp

    def test_small_file(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("timestamp,flow\n2020-01-01T00:00:00,1\n2020-01-01T00:10:00,2\n2020-01-01T00:20:00,3\n")
        assert len(load_csv(p)) == 3

    def test_timestamp_regression_names_line(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text(
            "timestamp,flow\n"
            "2020-01-01T00:00:00,1\n2020-01-01T00:10:00,2\n2020-01-01T00:20:00,3\n"
            "2020-01-01T00:15:00,4\n"
        )
        with pytest.raises(DataError, match="line 5"):
            load_csv(p)

    @pytest.mark.parametrize(
        "text, match",
        [
            ("time,value\n", "line 1"),
            ("timestamp,flow\n2020-01-01T00:00:00\n", "line 2"),
            ("timestamp,flow\n2020-01-01T00:00:00,abc\n", "line 2"),
            ("timestamp,flow\n", "no data"),
        ],
    )
    def test_malformed(self, tmp_path, text, match):
        p = tmp_path / "m.csv"
        p.write_text(text)
        with pytest.raises(DataError, match=match):
            load_csv(p)
