import numpy as np
import pytest

from specband import (TimeSeries, ValidationError, aggregate_interval,
                      aggregate_window_sums, demean, frac_diff, load_csv,
                      log_returns, sim_arfima, sim_jump_diffusion, write_csv)
from specband.series import frac_diff_values
from specband.simulate import JumpDiffusionSpec


def test_load_csv_basic(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("t,v\n1,1.0\n2,2.0\n3,3.0\n")
    s = load_csv(p)
    assert len(s) == 3
    np.testing.assert_array_equal(s.values, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(s.timestamps, [1, 2, 3])


def test_load_csv_named_columns(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("date,a,b\n2020-01-01,9,1.5\n2020-01-02,9,2.5\n")
    s = load_csv(p, time_col="date", value_col="b")
    np.testing.assert_array_equal(s.values, [1.5, 2.5])
    assert np.issubdtype(s.timestamps.dtype, np.datetime64)


def test_load_csv_unsorted_timestamps(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,v\n2,1.0\n1,2.0\n")
    with pytest.raises(ValidationError, match="unsorted"):
        load_csv(p)


def test_load_csv_non_numeric(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,v\n1,1.0\n2,oops\n")
    with pytest.raises(ValidationError, match="non-numeric"):
        load_csv(p)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="no such file"):
        load_csv(tmp_path / "nope.csv")


def test_load_csv_missing_column(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("t,v\n1,1.0\n2,2.0\n")
    with pytest.raises(ValidationError, match="missing column"):
        load_csv(p, value_col="w")


def test_csv_roundtrip_bit_exact(tmp_path):
    x = sim_arfima(0.35, 2048, seed=11)
    p = tmp_path / "arfima.csv"
    write_csv(x, p)
    back = load_csv(p)
    assert np.array_equal(back.values, x.values)   # identical float bits
    assert np.array_equal(back.timestamps, x.timestamps)


def test_timeseries_invariants():
    with pytest.raises(ValidationError):
        TimeSeries(np.array([1, 1]), np.array([1.0, 2.0]))
    with pytest.raises(ValidationError):
        TimeSeries(np.array([1]), np.array([1.0]))
    with pytest.raises(ValidationError):
        TimeSeries(np.array([1, 2]), np.array([1.0, np.nan]))


def test_timeseries_values_frozen():
    s = TimeSeries(np.array([0, 1]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_log_returns_identities():
    e = np.e
    s = TimeSeries(np.arange(3), np.array([1.0, e, e ** 2]))
    r = log_returns(s)
    np.testing.assert_allclose(r.values, [1.0, 1.0], rtol=1e-15)
    const = TimeSeries(np.arange(5), np.full(5, 3.7))
    assert np.all(log_returns(const).values == 0.0)
    with pytest.raises(ValidationError, match="non-positive"):
        log_returns(TimeSeries(np.arange(2), np.array([1.0, -1.0])))


def test_log_returns_variance_matches_diffusion():
    # tick-return variance of a constant-sigma path is sigma^2 * h / n
    sigma, n, h = 0.2, 23400, 1.0 / 252.0
    sample_vars = []
    for r in range(100):
        rec = sim_jump_diffusion(JumpDiffusionSpec(sigma=sigma, n=n, seed=200 + r))
        prices = rec.observed.with_values(np.exp(rec.observed.values))
        sample_vars.append(log_returns(prices).values.var())
    theory = sigma ** 2 * h / n
    assert abs(np.mean(sample_vars) / theory - 1.0) < 0.01


@pytest.mark.parametrize("d", [0.0, -0.3, 0.7])
def test_frac_diff_d0_identity(d):
    rng = np.random.default_rng(0)
    x = TimeSeries(np.arange(64), rng.normal(size=64))
    if d == 0.0:
        assert np.array_equal(frac_diff(x, 0.0).values, x.values)
    else:
        assert len(frac_diff(x, d)) == len(x)


def test_frac_diff_first_difference():
    x = TimeSeries(np.arange(3), np.array([1.0, 2.0, 4.0]))
    np.testing.assert_array_equal(frac_diff(x, 1.0).values, [1.0, 1.0, 2.0])


def test_frac_diff_rejects_large_order():
    x = TimeSeries(np.arange(4), np.ones(4))
    with pytest.raises(ValidationError):
        frac_diff(x, 2.5)


def _frac_diff_oracle(x, d):
    # direct convolution, independent of the library path
    n = len(x)
    pi = np.empty(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[k - 1] * (k - 1.0 - d) / k
    out = np.empty(n)
    for t in range(n):
        out[t] = float(np.dot(pi[: t + 1], x[t::-1]))
    return out


def test_frac_diff_matches_direct_convolution_oracle():
    rng = np.random.default_rng(5)
    x = rng.normal(size=700)          # above the FFT threshold
    got = frac_diff_values(x, 0.37)
    want = _frac_diff_oracle(x, 0.37)
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_frac_diff_roundtrip():
    rng = np.random.default_rng(7)
    x = rng.normal(size=2048)
    back = frac_diff_values(frac_diff_values(x, 0.4), -0.4)
    assert np.abs(back[100:] - x[100:]).max() < 1e-6


def test_frac_diff_order_additivity():
    rng = np.random.default_rng(9)
    x = rng.normal(size=1024)
    for d1, d2 in ((0.3, 0.4), (-0.5, 0.9), (1.0, -0.6)):
        a = frac_diff_values(frac_diff_values(x, d1), d2)
        b = frac_diff_values(x, d1 + d2)
        assert np.abs(a[200:] - b[200:]).max() < 1e-8


def test_demean():
    s = TimeSeries(np.arange(3), np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(demean(s).values, [-1.0, 0.0, 1.0], atol=1e-15)
    z = TimeSeries(np.arange(3), np.array([-1.0, 0.0, 1.0]))
    np.testing.assert_allclose(demean(z).values, z.values, atol=1e-15)
    rng = np.random.default_rng(1)
    big = TimeSeries(np.arange(1000), rng.normal(5.0, 2.0, 1000))
    assert abs(demean(big).values.mean()) < 1e-12


def test_aggregate_single_window_sum():
    daily = TimeSeries(np.arange(3), np.array([1.0, 1.0, 1.0]))
    out = aggregate_window_sums(daily, [(0, 2)])
    np.testing.assert_array_equal(out, [3.0])


def test_aggregate_two_singleton_windows():
    daily = TimeSeries(np.arange(2), np.array([0.4, 0.7]))
    out = aggregate_interval(daily, [(0, 0), (1, 1)])
    np.testing.assert_array_equal(out.values, [0.4, 0.7])


def test_aggregate_split_invariance():
    rng = np.random.default_rng(3)
    daily = TimeSeries(np.arange(30), rng.uniform(0.1, 1.0, 30))
    whole = aggregate_window_sums(daily, [(0, 29)])[0]
    parts = aggregate_window_sums(daily, [(0, 14), (15, 29)])
    # the split re-associates one floating sum
    assert whole == pytest.approx(parts.sum(), rel=1e-14)


def test_aggregate_errors():
    daily = TimeSeries(np.arange(5), np.ones(5))
    with pytest.raises(ValidationError, match="covers no data"):
        aggregate_window_sums(daily, [(10, 12)])
    with pytest.raises(ValidationError, match="overlapping"):
        aggregate_window_sums(daily, [(0, 2), (2, 4)])


def test_aggregate_calendar_windows():
    days = np.datetime64("2020-01-01") + np.arange(10)
    daily = TimeSeries(days, np.arange(10, dtype=float))
    out = aggregate_interval(daily, [
        (np.datetime64("2020-01-01"), np.datetime64("2020-01-05")),
        (np.datetime64("2020-01-06"), np.datetime64("2020-01-10")),
    ])
    np.testing.assert_array_equal(out.values, [0 + 1 + 2 + 3 + 4, 5 + 6 + 7 + 8 + 9])
    assert out.timestamps[0] == np.datetime64("2020-01-05")


def test_aggregate_monthly_diffusion_mc():
    # 21 daily realized variances sum to ~ sigma^2 * 21/252
    sigma, days, n_ticks = 0.2, 21, 390
    sums = []
    for rep in range(200):
        rvs = []
        for d in range(days):
            rec = sim_jump_diffusion(
                JumpDiffusionSpec(sigma=sigma, n=n_ticks, seed=rep * 100 + d))
            rvs.append((np.diff(rec.observed.values) ** 2).sum())
        daily = TimeSeries(np.arange(days), np.array(rvs), units="variance")
        sums.append(aggregate_window_sums(daily, [(0, days - 1)])[0])
    theory = sigma ** 2 * days / 252.0
    assert abs(np.mean(sums) / theory - 1.0) < 0.05
