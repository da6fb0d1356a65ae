import numpy as np
import pytest

from specband import (ValidationError, cwt_morlet, mc_significance, stream_rng,
                      wavelet_coherence)
from specband.coherence import FOURIER_FACTOR, coherence_to_csv, default_scales


def test_zero_series_gives_zero_field():
    field = cwt_morlet(np.zeros(64))
    assert np.abs(field.coefficients).max() == 0.0


def test_scale_grid_bounds():
    scales = default_scales(512, dt=1.0)
    assert scales[0] == 2.0
    assert scales[-1] <= 256.0
    assert np.all(np.diff(np.log2(scales)) > 0)
    with pytest.raises(ValidationError):
        default_scales(512, s0=-1.0)


def test_cosine_peak_scale():
    T, P = 512, 64.0
    x = np.cos(2 * np.pi * np.arange(T) / P)
    field = cwt_morlet(x)
    power = np.abs(field.coefficients[:, T // 4: 3 * T // 4]) ** 2
    peak = field.scales[int(power.mean(axis=1).argmax())]
    expected = P / (2 * np.pi * FOURIER_FACTOR / (2 * np.pi))  # = P / 1.0330
    # within one scale step of the geometric grid (dj = 1/12)
    assert abs(np.log2(peak) - np.log2(expected)) <= 1.0 / 12.0 + 1e-9


def test_impulse_energy_concentration():
    # the Morlet e-folding radius sqrt(2)*s holds all but erfc(sqrt(2)) ~ 4.6%
    # of the response energy; the discrete window boundary adds up to ~2%
    # at small scales, so the bound starts at s >= 4 samples
    T = 512
    imp = np.zeros(T)
    imp[T // 2] = 1.0
    field = cwt_morlet(imp)
    t = np.arange(T)
    for i, s in enumerate(field.scales):
        if s < 4.0 or s > T / 8.0:
            continue
        power = np.abs(field.coefficients[i]) ** 2
        outside = power[np.abs(t - T // 2) > np.sqrt(2.0) * s].sum()
        assert outside / power.sum() < 0.07


def test_cwt_linearity():
    x = stream_rng(1).normal(size=128)
    y = stream_rng(2).normal(size=128)
    fx = cwt_morlet(x).coefficients
    fy = cwt_morlet(y).coefficients
    fxy = cwt_morlet(x + y).coefficients
    scale = np.abs(fxy).max()
    assert np.abs(fxy - fx - fy).max() < 1e-10 * scale


def test_coi_depends_only_on_shape():
    a = cwt_morlet(stream_rng(3).normal(size=200))
    b = cwt_morlet(stream_rng(4).normal(size=200) * 50.0 + 3.0)
    np.testing.assert_array_equal(a.coi, b.coi)
    assert a.coi[0] == 0.0
    assert a.coi[100] == pytest.approx(99 / np.sqrt(2.0))   # nearer edge rules


def test_self_coherence_is_one_with_zero_phase():
    x = stream_rng(5).normal(size=256)
    res = wavelet_coherence(x, x)
    assert np.abs(res.r2 - 1.0).max() < 1e-10
    assert np.abs(res.phase).max() < 1e-8


def test_anti_phase_series():
    x = stream_rng(6).normal(size=256)
    res = wavelet_coherence(x, -x)
    assert np.abs(res.r2 - 1.0).max() < 1e-10
    assert np.abs(np.abs(res.phase) - np.pi).max() < 1e-8


def test_r2_bounded():
    x = stream_rng(7).normal(size=300)
    y = np.roll(x, 5) + 0.5 * stream_rng(8).normal(size=300)
    res = wavelet_coherence(x, y)
    assert res.r2.min() >= 0.0
    assert res.r2.max() <= 1.0 + 1e-12
    assert res.phase.min() > -np.pi - 1e-12 and res.phase.max() <= np.pi + 1e-12


def test_scaling_invariance():
    x = stream_rng(9).normal(size=256)
    y = stream_rng(10).normal(size=256)
    r0 = wavelet_coherence(x, y)
    r1 = wavelet_coherence(3.7 * x, 0.002 * y)
    np.testing.assert_allclose(r1.r2, r0.r2, atol=1e-10)
    np.testing.assert_allclose(r1.phase, r0.phase, atol=1e-10)


def test_length_mismatch():
    with pytest.raises(ValidationError):
        wavelet_coherence(np.ones(64), np.ones(65))


def test_mc_significance_determinism_and_preconditions():
    x = stream_rng(11).normal(size=128)
    y = stream_rng(12).normal(size=128)
    t1 = mc_significance(x, y, n_surrogates=100, seed=5)
    t2 = mc_significance(x, y, n_surrogates=100, seed=5)
    np.testing.assert_array_equal(t1, t2)
    with pytest.raises(ValidationError, match="100 surrogates"):
        mc_significance(x, y, n_surrogates=50)
    with pytest.raises(ValidationError, match="quantile"):
        mc_significance(x, y, n_surrogates=100, quantile=1.5)
    with pytest.raises(ValidationError, match="lag-1"):
        mc_significance(np.ones(3), np.ones(3), n_surrogates=100)


def test_mc_significance_thread_count_invariance(monkeypatch):
    x = stream_rng(13).normal(size=128)
    y = stream_rng(14).normal(size=128)
    t1 = mc_significance(x, y, n_surrogates=100, seed=9)
    monkeypatch.setenv("SPECBAND_THREADS", "4")
    t2 = mc_significance(x, y, n_surrogates=100, seed=9)
    np.testing.assert_array_equal(t1, t2)


def test_independent_noise_mostly_below_threshold():
    T = 256
    x = stream_rng(15).normal(size=T)
    y = stream_rng(16).normal(size=T)
    thr = mc_significance(x, y, n_surrogates=120, seed=21)
    res = wavelet_coherence(stream_rng(17).normal(size=T),
                            stream_rng(18).normal(size=T))
    outside = ~res.in_coi()
    frac_below = (res.r2 < thr)[outside].mean()
    assert frac_below >= 0.90


def test_coherence_csv_export(tmp_path):
    x = stream_rng(19).normal(size=64)
    res = wavelet_coherence(x, np.roll(x, 2))
    path = tmp_path / "coh.csv"
    coherence_to_csv(res, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "time,scale,r2,phase,significant_flag,in_coi_flag"
    assert len(lines) == 1 + res.r2.size
    cells = lines[1].split(",")
    assert cells[4] == ""       # no threshold attached
    assert cells[5] in ("0", "1")
