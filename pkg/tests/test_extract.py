import csv

import numpy as np
import pytest

from bayesevt import (
    DataFormatError,
    EmptySampleError,
    ExceedanceSample,
    ExtremesSample,
    TimeSeries,
    block_maxima,
    bootstrap_return_level_ci,
    empirical_return_level,
    empirical_return_level_by_group,
    empirical_var_es,
    exceedances,
    ingest_csv,
)
from bayesevt.errors import ConfigError


def daily(years=3, start="2001-01-01", seed=0, labels=None):
    t = np.arange(np.datetime64(start), np.datetime64(start) + 365 * years)
    v = np.random.default_rng(seed).normal(size=t.size)
    return TimeSeries(t, v, "x", labels)


def test_timeseries_validation():
    with pytest.raises(ValueError):
        TimeSeries(np.array([2, 1]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        TimeSeries(np.array([1, 2]), np.array([0.0, np.nan]))
    ts = TimeSeries(np.array([1, 1]), np.array([0.0, 1.0]), labels=["a", "b"])
    assert len(ts) == 2


def test_calendar_year_blocks():
    ts = daily(3)
    s = block_maxima(ts)
    years = ts.times.astype("datetime64[Y]").astype(int) + 1970
    expect = [ts.values[years == y].max() for y in np.unique(years)]
    np.testing.assert_array_equal(s.values, expect)
    assert s.block_ids[0] == "2001"
    assert s.n_groups == 1


def test_fixed_blocks_and_every_grouping():
    ts = TimeSeries(np.arange(100), np.arange(100.0))
    s = block_maxima(ts, block="n:10", group="every:3")
    np.testing.assert_array_equal(s.values, np.arange(9.0, 100, 10))
    np.testing.assert_array_equal(s.group_ids, [0, 0, 0, 1, 1, 1, 2, 2, 2, 3])
    assert s.block_spec == "n:10"


def test_minima_via_sign():
    ts = TimeSeries(np.arange(4), np.array([1.0, -3.0, 2.0, 0.5]))
    s = block_maxima(ts, block=2, sign=-1)
    np.testing.assert_array_equal(s.values, [3.0, -0.5])


def test_label_grouping():
    a, b = daily(2, seed=1), daily(2, seed=2)
    ts = TimeSeries(np.concatenate([a.times, b.times]), np.concatenate([a.values, b.values]),
                    labels=["SP"] * len(a) + ["FTSE"] * len(b))
    s = block_maxima(ts, group="label")
    assert s.group_labels == ("SP", "FTSE")
    assert len(s) == 4 and s.block_ids[0] == "SP:2001"


@pytest.mark.parametrize("bad", ["decade", "n:0", 0, "n:x"])
def test_bad_block(bad):
    with pytest.raises(ConfigError):
        block_maxima(daily(1), block=bad)


def test_bad_group():
    with pytest.raises(ConfigError):
        block_maxima(daily(1), group="every:0")


def test_year_blocks_need_dates():
    with pytest.raises(ConfigError):
        block_maxima(TimeSeries(np.arange(3), np.zeros(3)))


def test_sample_roundtrip_and_select():
    s = block_maxima(TimeSeries(np.arange(60), np.arange(60.0)), block=10, group="every:2")
    assert ExtremesSample.from_dict(s.to_dict()).to_dict() == s.to_dict()
    sub = s.select_groups([2])
    np.testing.assert_array_equal(sub.values, [49.0, 59.0])
    assert sub.group_labels == ("2",)
    assert sub.group_ids.tolist() == [0, 0]


def test_exceedances():
    ts = TimeSeries(np.arange(6), np.array([1.0, 5.0, 3.0, 7.0, 4.0, 4.5]))
    e = exceedances(ts, 4.0)
    np.testing.assert_array_equal(e.excesses, [1.0, 3.0, 0.5])
    assert (e.n_total, e.n_exceed) == (6, 3)
    assert e.exceed_fraction == 0.5
    assert ExceedanceSample.from_dict(e.to_dict()).n_exceed == 3
    with pytest.raises(EmptySampleError):
        exceedances(ts, 10.0)


def test_empirical_return_level():
    x = np.arange(1.0, 11.0)
    assert empirical_return_level(x, 10) == pytest.approx(np.quantile(x, 0.9))
    with pytest.raises(ValueError):
        empirical_return_level(x, 1.5)
    s = block_maxima(TimeSeries(np.arange(40), np.arange(40.0)), block=4, group="every:5")
    per = empirical_return_level_by_group(s, 2)
    assert per.shape == (2,)


def test_bootstrap_ci_brackets_estimate():
    x = np.random.default_rng(0).gumbel(size=200)
    lo, hi = bootstrap_return_level_ci(x, 10, np.random.default_rng(1), n_boot=500)
    assert lo < empirical_return_level(x, 10) < hi


def test_empirical_var_es():
    x = np.arange(1.0, 101.0)
    var, es = empirical_var_es(x, 0.05)
    assert var == pytest.approx(np.quantile(x, 0.95))
    assert es == pytest.approx(x[x > var].mean())
    with pytest.raises(EmptySampleError):
        empirical_var_es(np.ones(10), 0.05)


def _write(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def test_ingest_sorts(tmp_path):
    p = tmp_path / "a.csv"
    rows = [["date", "value"]] + [[f"2020-01-{d:02d}", str(d)] for d in range(10, 0, -1)]
    _write(p, rows)
    ts = ingest_csv(p, "value", "date")
    assert len(ts) == 10
    assert ts.values.tolist() == list(range(1, 11))


def test_ingest_groups(tmp_path):
    p = tmp_path / "b.csv"
    rows = [["date", "close", "idx"]]
    for d in range(1, 4):
        rows += [[f"2020-01-0{d}", str(d), "SP"], [f"2020-01-0{d}", str(-d), "FTSE"]]
    _write(p, rows)
    ts = ingest_csv(p, "close", "date", "idx")
    assert sorted(set(ts.labels)) == ["FTSE", "SP"]
    s = block_maxima(ts, group="label")
    assert s.n_groups == 2


def test_ingest_errors_name_line(tmp_path):
    p = tmp_path / "c.csv"
    _write(p, [["date", "value"], ["2020-01-01", "1"], ["2020-13-45", "2"]])
    with pytest.raises(DataFormatError, match="line 3"):
        ingest_csv(p, "value", "date")
    _write(p, [["date", "value"], ["2020-01-01", "1"], ["2020-01-02", "abc"]])
    with pytest.raises(DataFormatError, match="line 3"):
        ingest_csv(p, "value", "date")
    _write(p, [["date", "value"], ["2020-01-01", "1"], ["2020-01-01", "2"]])
    with pytest.raises(DataFormatError, match="duplicate"):
        ingest_csv(p, "value", "date")
    with pytest.raises(DataFormatError, match="missing column"):
        ingest_csv(p, "price", "date")
