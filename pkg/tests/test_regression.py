import numpy as np
import pytest

from specband import (BandSpec, TimeSeries, ValidationError, fmnbls, nbls, ols,
                      sim_fcoint, stream_rng, wbls)
from specband.modwt import modwt, wavelet_covariance


def _pair(seed, T=512):
    x = stream_rng(seed, 0).normal(size=T)
    e = stream_rng(seed, 1).normal(size=T)
    return x, 0.5 + 1.3 * x + 0.4 * e


def test_ols_exact_line():
    x = stream_rng(0).normal(size=50)
    y = 2.0 * x + 1.0
    fit = ols(y, x)
    assert abs(fit.alpha - 1.0) < 1e-12
    assert abs(fit.beta - 2.0) < 1e-12
    assert np.abs(fit.residuals.values).max() < 1e-12
    assert fit.residual_d is None         # degenerate residuals carry no memory


def test_ols_residuals_sum_to_zero():
    x, y = _pair(1)
    fit = ols(y, x)
    assert abs(fit.residuals.values.sum()) < 1e-10


def test_ols_null_slope_within_3se():
    betas, ses = [], []
    for r in range(100):
        x = stream_rng(60, 2 * r).normal(size=256)
        y = stream_rng(60, 2 * r + 1).normal(size=256)
        fit = ols(y, x)
        betas.append(fit.beta)
        ses.append(fit.se_beta)
    assert abs(np.mean(betas)) < 3 * np.mean(ses) / np.sqrt(len(betas))


def test_ols_zero_variance_regressor():
    with pytest.raises(ValidationError, match="zero variance"):
        ols(np.arange(5.0), np.ones(5))


@pytest.mark.parametrize("T", [500, 501, 512])
def test_full_band_collapse(T):
    x = stream_rng(2, T).normal(size=T)
    y = 0.3 + 1.7 * x + stream_rng(3, T).normal(size=T)
    b = ols(y, x).beta
    J = int(np.floor(np.log2(T)))
    assert abs(wbls(y, x, 1, J, levels=J, include_scaling=True).beta - b) \
        <= 1e-8 * abs(b)
    assert abs(nbls(y, x).beta - b) <= 1e-8 * abs(b)


def test_wbls_band_additivity_exact():
    x, y = _pair(4)
    xc, yc = x - x.mean(), y - y.mean()
    dx, dy = modwt(xc, 6), modwt(yc, 6)
    full = sum(wavelet_covariance(dx, dy, j).value for j in range(1, 7))
    low = sum(wavelet_covariance(dx, dy, j).value for j in range(1, 4))
    high = sum(wavelet_covariance(dx, dy, j).value for j in range(4, 7))
    # identical per-level terms; the split only re-associates the sum
    assert full == pytest.approx(low + high, rel=1e-14, abs=1e-300)


def test_scale_equivariance():
    x, y = _pair(5)
    a, b = 2.5, 0.4
    f0 = wbls(y, x, 2, 4)
    f1 = wbls(b * y, a * x, 2, 4)
    assert abs(f1.beta - (b / a) * f0.beta) < 1e-12
    n0 = nbls(y, x, BandSpec.indices(3, 40))
    n1 = nbls(b * y, a * x, BandSpec.indices(3, 40))
    assert abs(n1.beta - (b / a) * n0.beta) < 1e-12


def test_reconstruction_identity():
    x, y = _pair(6)
    for fit in (ols(y, x), wbls(y, x, 1, 3),
                nbls(y, x, BandSpec.exponents(0.3, 0.6)),
                fmnbls(y, x, BandSpec.exponents(0.3, 0.5))):
        recon = fit.alpha + fit.beta * x + fit.residuals.values
        np.testing.assert_allclose(recon, y, atol=1e-12)


def test_proportional_series_any_band():
    x = stream_rng(7).normal(size=512)
    y = 3.0 * x
    for band in (BandSpec.indices(1, 5), BandSpec.indices(40, 200),
                 BandSpec.exponents(0.4, 0.6)):
        assert abs(nbls(y, x, band).beta - 3.0) < 1e-10
    assert abs(wbls(y, x, 2, 5).beta - 3.0) < 1e-10


def test_wbls_band_validation():
    x, y = _pair(8, T=256)
    with pytest.raises(ValidationError):
        wbls(y, x, 0, 3)
    with pytest.raises(ValidationError):
        wbls(y, x, 3, 9, levels=8)
    with pytest.raises(ValidationError):
        wbls(y, x, 1, 9, levels=9)   # 2^9 > 256


def test_nbls_empty_band():
    x, y = _pair(9, T=128)
    with pytest.raises(ValidationError):
        nbls(y, x, BandSpec.indices(90, 60))


def test_bandspec_resolution_and_labels():
    band = BandSpec.exponents(0.4, 0.6)
    assert band.resolve_fourier(4096) == (27, 147)   # floor(2^4.8), floor(2^7.2)
    assert band.label() == "[T^0.4,T^0.6]"
    assert BandSpec.wavelet(5, 6).label() == "[5,6]"
    with pytest.raises(ValidationError):
        BandSpec.indices(4, 2)
    with pytest.raises(ValidationError):
        BandSpec.indices(5, 9).resolve_fourier(4)   # clips to an empty range


def test_fcoint_exact_relation_recovered_by_every_estimator():
    x, y, truth = sim_fcoint(beta=1.4, alpha=0.2, d=0.45, d_u=0.1,
                             u_sd=0.0, n=1024, seed=77)
    for fit in (ols(y, x), wbls(y, x, 2, 5, levels=6),
                nbls(y, x, BandSpec.exponents(0.4, 0.7)),
                fmnbls(y, x, BandSpec.exponents(0.3, 0.5))):
        assert abs(fit.beta - truth.beta) < 1e-8
        assert abs(fit.alpha - truth.alpha) < 1e-8


def test_fmnbls_matches_nbls_without_endogeneity():
    diffs, ses = [], []
    for r in range(60):
        x, y, _ = sim_fcoint(beta=1.0, d=0.4, d_u=0.0, rho=0.0,
                             n=2048, seed=4000 + r)
        base = nbls(y, x, BandSpec.exponents(0.4, 0.6))
        fm = fmnbls(y, x, BandSpec.exponents(0.4, 0.6))
        diffs.append(fm.beta - base.beta)
    se_mean = np.std(diffs) / np.sqrt(len(diffs))
    assert abs(np.mean(diffs)) < 2 * se_mean + 1e-3


def test_fmnbls_requires_higher_aux_band():
    x, y, _ = sim_fcoint(n=1024, seed=3)
    with pytest.raises(ValidationError, match="aux band"):
        fmnbls(y, x, BandSpec.exponents(0.4, 0.7),
               aux_band=BandSpec.exponents(0.3, 0.5))


def test_fmnbls_reports_gamma():
    x, y, _ = sim_fcoint(beta=1.0, d=0.45, d_u=0.2, rho=0.4, n=2048, seed=8)
    fit = fmnbls(y, x, BandSpec.exponents(0.4, 0.6))
    assert 0.0 <= fit.gamma_used <= 1.0
    assert fit.method == "fmnbls"


def test_fit_carries_band_and_residual_memory():
    x, y, _ = sim_fcoint(beta=1.0, d=0.4, d_u=0.0, n=2048, seed=12)
    fit = wbls(y, x, 5, 6, levels=6)
    assert fit.band.kind == "wavelet_levels"
    assert fit.residual_d is not None
    assert fit.residual_d.se == np.pi / np.sqrt(24.0 * fit.residual_d.m)


def test_accepts_timeseries_inputs():
    xv, yv = _pair(13)
    ts = np.arange(len(xv))
    fit = ols(TimeSeries(ts, yv), TimeSeries(ts, xv))
    assert isinstance(fit.residuals, TimeSeries)
    assert np.array_equal(fit.residuals.timestamps, ts)
