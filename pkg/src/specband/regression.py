"""Band spectrum regression: OLS, WBLS, NBLS and FMNBLS.

All estimators fit y = alpha + beta * x + e and differ only in which part
of the spectrum identifies beta:

* ``ols``    - the full sample (time domain).
* ``wbls``   - MODWT wavelet band: beta is the ratio of summed wavelet
  covariances to summed wavelet variances over scales j in [k, l]
  (biased, all-coefficient estimates on demeaned data, so that the full
  band with the scaling terms reproduces OLS exactly).
* ``nbls``   - averaged (cross-)periodogram over a Fourier index band.
* ``fmnbls`` - NBLS plus a bias correction estimated from an auxiliary
  NBLS of the fractionally differenced residuals on the differenced
  regressor over a higher-frequency band.  The raw auxiliary coefficient
  measures the regressor/error coherence at the auxiliary band; it is
  mapped back to the primary band with a power-law transfer ratio implied
  by the estimated memory orders before being subtracted (an additive
  correction without the transfer would import the larger high-frequency
  bias instead of removing the low-frequency one).

Every fit reports residuals satisfying y = alpha + beta*x + e exactly and
a GPH memory estimate of the residuals when the sample permits one.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ValidationError
from .longmemory import MemoryEstimate, gph
from .modwt import (D4, FilterPair, modwt, scaling_covariance, scaling_variance,
                    wavelet_covariance, wavelet_variance)
from .series import TimeSeries, frac_diff_values

_MOD = "band-regression"

_RESIDUAL_MEMORY_Q = 0.7


@dataclass(frozen=True)
class BandSpec:
    """A spectral band: wavelet levels, Fourier exponents or raw indices.

    * ``wavelet_levels``: integer levels k..l of a MODWT decomposition.
    * ``fourier_exponents``: (a, b) resolving to indices floor(T^a)..floor(T^b).
    * ``fourier_indices``: raw DFT indices (1 <= k <= l <= T-1).
    """

    kind: str
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in ("wavelet_levels", "fourier_exponents", "fourier_indices"):
            raise ValidationError(f"unknown band kind {self.kind!r}", module=_MOD)
        if self.lo > self.hi:
            raise ValidationError("band lo must not exceed hi", module=_MOD)
        if self.kind != "fourier_exponents":
            if self.lo != int(self.lo) or self.hi != int(self.hi):
                raise ValidationError("level/index bands must be integers", module=_MOD)
            if self.lo < 1:
                raise ValidationError("band indices start at 1", module=_MOD)

    @classmethod
    def wavelet(cls, k: int, l: int) -> "BandSpec":
        return cls("wavelet_levels", k, l)

    @classmethod
    def exponents(cls, a: float, b: float) -> "BandSpec":
        return cls("fourier_exponents", a, b)

    @classmethod
    def indices(cls, k: int, l: int) -> "BandSpec":
        return cls("fourier_indices", k, l)

    def resolve_fourier(self, T: int):
        """Map to raw DFT indices (k, l) for a length-T sample."""
        if self.kind == "wavelet_levels":
            raise ValidationError("wavelet band used where a Fourier band is needed",
                                  module=_MOD)
        if self.kind == "fourier_exponents":
            k = max(1, int(math.floor(T ** self.lo)))
            l = int(math.floor(T ** self.hi))
        else:
            k, l = int(self.lo), int(self.hi)
        l = min(l, T - 1)
        if not 1 <= k <= l:
            raise ValidationError(f"band resolves to empty index range ({k}, {l})",
                                  module=_MOD)
        return k, l

    def label(self) -> str:
        if self.kind == "fourier_exponents":
            return f"[T^{self.lo:g},T^{self.hi:g}]"
        return f"[{int(self.lo)},{int(self.hi)}]"


@dataclass(frozen=True)
class RegressionFit:
    """Result of one implied-realized style regression."""

    alpha: float
    beta: float
    se_alpha: float
    se_beta: float
    residuals: TimeSeries
    residual_d: MemoryEstimate | None
    method: str
    band: BandSpec | None
    gamma_used: float = 0.0


def _pair_values(y, x):
    yv = y.values if isinstance(y, TimeSeries) else np.asarray(y, dtype=float)
    xv = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    if len(yv) != len(xv):
        raise ValidationError("x and y must have equal length", module=_MOD)
    return yv, xv


def _result_series(x, resid):
    if isinstance(x, TimeSeries):
        return x.with_values(resid, units="residual")
    return TimeSeries(np.arange(len(resid), dtype=np.int64), resid, units="residual")


def _residual_memory(resid: np.ndarray, scale: float):
    """GPH memory of the residuals, or None when the fit is degenerate.

    Residuals at float-noise level relative to the dependent variable are
    an exact fit; their periodogram is numerical garbage, not memory.
    """
    if scale <= 0.0 or float(np.std(resid)) < 1e-10 * scale:
        return None
    try:
        return gph(resid, _RESIDUAL_MEMORY_Q)
    except (ValidationError, NumericError):
        return None


def ols(y, x) -> RegressionFit:
    """Ordinary least squares with intercept."""
    yv, xv = _pair_values(y, x)
    T = len(yv)
    if T < 3:
        raise ValidationError("need at least 3 observations", module=_MOD)
    xc = xv - xv.mean()
    sxx = float((xc ** 2).sum())
    if sxx == 0.0:
        raise ValidationError("regressor has zero variance", module=_MOD)
    beta = float((xc * yv).sum() / sxx)
    alpha = float(yv.mean() - beta * xv.mean())
    resid = yv - alpha - beta * xv
    s2 = float((resid ** 2).sum() / (T - 2)) if T > 2 else 0.0
    se_beta = math.sqrt(s2 / sxx)
    se_alpha = math.sqrt(s2 * (1.0 / T + xv.mean() ** 2 / sxx))
    return RegressionFit(alpha, beta, se_alpha, se_beta,
                         _result_series(x, resid), _residual_memory(resid, float(np.std(yv))),
                         method="ols", band=None)


def wbls(y, x, k: int = 1, l: int | None = None, levels: int = 6,
         filt: FilterPair = D4, include_scaling: bool = False) -> RegressionFit:
    """Wavelet band least squares over MODWT scales j in [k, l].

    beta = sum_j cov_hat(j) / sum_j var_hat(j) using biased (all
    coefficient) estimates on the demeaned series.  When l == levels and
    ``include_scaling`` is set, the scaling-coefficient terms join both
    sums, which makes the full band algebraically identical to OLS.
    Standard errors follow a band-energy convention: the residual band
    variance over the regressor band variance, divided by the effective
    boundary-free coefficient count.
    """
    yv, xv = _pair_values(y, x)
    T = len(yv)
    if l is None:
        l = levels
    if not (1 <= k <= l <= levels):
        raise ValidationError(f"need 1 <= k <= l <= J (got {k}, {l}, {levels})",
                              module=_MOD)
    if 2 ** levels > T:
        raise ValidationError(f"J={levels} too deep for T={T}", module=_MOD)
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    dec_x = modwt(xc, levels, filt)
    dec_y = modwt(yc, levels, filt)
    use_scaling = include_scaling and l == levels
    num = sum(wavelet_covariance(dec_x, dec_y, j).value for j in range(k, l + 1))
    den = sum(wavelet_variance(dec_x, j).value for j in range(k, l + 1))
    if use_scaling:
        num += scaling_covariance(dec_x, dec_y).value
        den += scaling_variance(dec_x).value
    if den == 0.0:
        raise ValidationError("regressor carries no energy in the band", module=_MOD)
    beta = float(num / den)
    alpha = float(yv.mean() - beta * xv.mean())
    resid = yv - alpha - beta * xv
    dec_e = modwt(resid - resid.mean(), levels, filt)
    e_band = sum(wavelet_variance(dec_e, j).value for j in range(k, l + 1))
    if use_scaling:
        e_band += scaling_variance(dec_e).value
    n_eff = int(sum(max(int(m), 1) for m in dec_x.boundary_counts[k - 1:l]))
    if use_scaling:
        n_eff += T
    se_beta = math.sqrt((e_band / den) / n_eff)
    se_alpha = math.sqrt(e_band / T + (xv.mean() * se_beta) ** 2)
    return RegressionFit(alpha, beta, se_alpha, se_beta,
                         _result_series(x, resid), _residual_memory(resid, float(np.std(yv))),
                         method="wbls", band=BandSpec.wavelet(k, l))


def _band_cross_sums(xv, yv, k, l):
    """Averaged cross-periodogram numerator/denominator over DFT indices k..l.

    Sums run over raw indices, so a full band (1, T-1) covers each
    conjugate pair twice plus the Nyquist ordinate once -- exactly the
    decomposition of the time-domain moments of demeaned series.
    """
    T = len(xv)
    fx = np.fft.fft(xv - xv.mean())
    fy = np.fft.fft(yv - yv.mean())
    sel = slice(k, l + 1)
    f_xy = float((fx[sel] * np.conj(fy[sel])).sum().real) / (T * T)
    f_xx = float((np.abs(fx[sel]) ** 2).sum()) / (T * T)
    return f_xy, f_xx


def nbls(y, x, band: BandSpec | None = None) -> RegressionFit:
    """Narrow band least squares on averaged periodograms.

    ``band=None`` selects the full band (all DFT indices 1..T-1), which is
    algebraically identical to OLS on demeaned data.
    """
    yv, xv = _pair_values(y, x)
    T = len(yv)
    if T < 3:
        raise ValidationError("need at least 3 observations", module=_MOD)
    if band is None:
        k, l = 1, T - 1
        band = BandSpec.indices(1, T - 1)
    else:
        k, l = band.resolve_fourier(T)
    f_xy, f_xx = _band_cross_sums(xv, yv, k, l)
    if f_xx == 0.0:
        raise ValidationError("regressor carries no energy in the band", module=_MOD)
    beta = float(f_xy / f_xx)
    alpha = float(yv.mean() - beta * xv.mean())
    resid = yv - alpha - beta * xv
    _, f_ee = _band_cross_sums(resid, resid, k, l)
    n_band = l - k + 1
    se_beta = math.sqrt((f_ee / f_xx) / n_band)
    se_alpha = math.sqrt(f_ee / T + (xv.mean() * se_beta) ** 2)
    return RegressionFit(alpha, beta, se_alpha, se_beta,
                         _result_series(x, resid), _residual_memory(resid, float(np.std(yv))),
                         method="nbls", band=band)


def _clamp(v, lo, hi):
    return min(max(v, lo), hi)


def _bias_transfer_ratio(T, band, aux, d_x, d_u, gamma):
    """Ratio of the regressor/error bias at the primary band to the
    (gamma-differenced) auxiliary band, under power-law spectra.

    With f_x ~ a(lam)^(-2 d_x) and Re f_xu ~ a(lam)^(-(d_x + d_u)) *
    cos((d_x - d_u)(pi - lam)/2), a(lam) = 2 sin(lam/2), the NBLS bias over
    a band is the ratio of band sums of those two shapes; differencing by
    gamma multiplies both by a(lam)^(2 gamma).  The unknown constant
    G_xu / G_x cancels between the two bands.
    """
    def band_ratio(idx_lo, idx_hi, extra):
        j = np.arange(idx_lo, idx_hi + 1)
        lam = 2.0 * np.pi * j / T
        a = 2.0 * np.sin(lam / 2.0)
        phase = np.cos((d_x - d_u) * (np.pi - lam) / 2.0)
        num = (a ** (extra - (d_x + d_u)) * phase).sum()
        den = (a ** (extra - 2.0 * d_x)).sum()
        return num / den

    r_band = band_ratio(*band, 0.0)
    r_aux = band_ratio(*aux, 2.0 * gamma)
    if r_aux == 0.0:
        return 1.0
    return float(r_band / r_aux)


def fmnbls(y, x, band: BandSpec, aux_band: BandSpec | None = None,
           q: float = _RESIDUAL_MEMORY_Q) -> RegressionFit:
    """Fully modified NBLS: bias-corrected narrow band least squares.

    Steps: (1) NBLS over ``band`` gives beta_0 and residuals; (2) the
    residual memory gamma = clamp(d_hat(resid), 0, 1) sets the differencing
    order; (3) an auxiliary NBLS of the gamma-differenced residuals on the
    gamma-differenced regressor over ``aux_band`` (default exponents
    0.6..0.8) measures the regressor/error dependence there; (4) that
    coefficient is mapped to the primary band with the power-law transfer
    ratio and subtracted.  With uncorrelated errors the auxiliary
    coefficient is ~0 and the estimate reduces to plain NBLS.
    """
    yv, xv = _pair_values(y, x)
    T = len(yv)
    if aux_band is None:
        aux_band = BandSpec.exponents(0.6, 0.8)
    base = nbls(yv, xv, band)
    k_b, l_b = band.resolve_fourier(T)
    k_a, l_a = aux_band.resolve_fourier(T)
    if l_a <= l_b:
        raise ValidationError("aux band must extend to higher frequencies than "
                              "the primary band", module=_MOD)
    gamma = _clamp(base.residual_d.d_hat if base.residual_d else 0.0, 0.0, 1.0)
    u_hat = base.residuals.values
    du_hat = frac_diff_values(u_hat, gamma)
    dx_hat_vals = frac_diff_values(xv, gamma)
    aux = nbls(du_hat, dx_hat_vals, aux_band)
    # memory orders for the transfer ratio; clamped to a sane range
    try:
        d_x = _clamp(gph(xv, q).d_hat, 0.0, 1.2)
    except (ValidationError, NumericError):
        d_x = 0.0
    d_u = _clamp(gamma, 0.0, d_x)
    r = _bias_transfer_ratio(T, (k_b, l_b), (k_a, l_a), d_x, d_u, gamma)
    r = _clamp(r, 0.0, 0.95)
    bias_primary = r * aux.beta / (1.0 - r)
    beta = base.beta - bias_primary
    alpha = float(yv.mean() - beta * xv.mean())
    resid = yv - alpha - beta * xv
    return RegressionFit(alpha, beta, base.se_alpha, math.hypot(base.se_beta, r * aux.se_beta / (1.0 - r)),
                         _result_series(x, resid), _residual_memory(resid, float(np.std(yv))),
                         method="fmnbls", band=band, gamma_used=gamma)
