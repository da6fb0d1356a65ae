"""Fourier periodogram and GPH log-periodogram estimation of memory order.

The GPH regression uses the exact form of the estimator: log I(lambda_j)
is regressed on -2*log|2 sin(lambda_j/2)| over the first m = floor(T**q)
Fourier frequencies, and the reported standard error is the asymptotic
pi / sqrt(24 m).
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ValidationError
from .series import TimeSeries

_MOD = "longmemory"


@dataclass(frozen=True)
class Spectrum:
    """(Cross-)periodogram ordinates at lambda_j = 2*pi*j/T.

    Holds j = 1 .. floor((T-1)/2); for even T the Nyquist ordinate is
    exposed separately so identities that need every frequency exactly
    once (Parseval, full-band regression) can include it.
    """

    frequencies: np.ndarray
    ordinates: np.ndarray
    T: int
    nyquist: complex | float | None = None


def _values(x):
    return x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)


def periodogram(x, y=None) -> Spectrum:
    """Periodogram of ``x``, or cross-periodogram of ``x`` and ``y``.

    Inputs are demeaned first.  Ordinates are
    I_xy(lambda_j) = (2 pi T)^{-1} * X(lambda_j) * conj(Y(lambda_j))
    with X, Y the DFTs of the demeaned series; the auto case (y omitted)
    returns real nonnegative ordinates.
    """
    xv = _values(x)
    xv = xv - xv.mean()
    T = len(xv)
    if T < 2:
        raise ValidationError("series too short for a periodogram", module=_MOD)
    auto = y is None
    fx = np.fft.rfft(xv)
    if auto:
        fy = fx
    else:
        yv = _values(y)
        if len(yv) != T:
            raise ValidationError("length mismatch between series", module=_MOD)
        fy = np.fft.rfft(yv - yv.mean())
    m = (T - 1) // 2
    cross = fx[1:m + 1] * np.conj(fy[1:m + 1]) / (2.0 * np.pi * T)
    freqs = 2.0 * np.pi * np.arange(1, m + 1) / T
    nyq = None
    if T % 2 == 0:
        nyq = fx[T // 2] * np.conj(fy[T // 2]) / (2.0 * np.pi * T)
        nyq = float(nyq.real) if auto else complex(nyq)
    ordinates = cross.real if auto else cross
    return Spectrum(freqs, ordinates, T, nyq)


@dataclass(frozen=True)
class MemoryEstimate:
    """GPH estimate of the fractional integration order."""

    d_hat: float
    se: float
    m: int
    q: float


def gph(x, q: float = 0.7, regressor: str = "sine") -> MemoryEstimate:
    """Log-periodogram (GPH) estimate of d using m = floor(T**q) frequencies.

    ``regressor`` selects the spectral regressor: 'sine' uses
    -2*log|2 sin(lambda/2)| (the estimator's exact form), 'loglambda' the
    small-frequency approximation -2*log(lambda).  A zero ordinate inside
    the band signals degenerate input and raises rather than being dropped.
    """
    xv = _values(x)
    T = len(xv)
    m = int(np.floor(T ** q))
    spec = periodogram(xv)
    if m < 4:
        raise ValidationError(f"GPH bandwidth m={m} < 4 (T={T}, q={q})", module=_MOD)
    if m > len(spec.ordinates):
        raise ValidationError(
            f"GPH bandwidth m={m} exceeds the {len(spec.ordinates)} available "
            "periodogram ordinates", module=_MOD)
    ords = spec.ordinates[:m]
    if np.any(ords <= 0.0):
        raise NumericError("zero periodogram ordinate inside the GPH band", module=_MOD)
    lam = spec.frequencies[:m]
    if regressor == "sine":
        reg = -2.0 * np.log(np.abs(2.0 * np.sin(lam / 2.0)))
    elif regressor == "loglambda":
        reg = -2.0 * np.log(lam)
    else:
        raise ValidationError(f"unknown GPH regressor {regressor!r}", module=_MOD)
    reg_c = reg - reg.mean()
    d_hat = float((reg_c * np.log(ords)).sum() / (reg_c ** 2).sum())
    se = float(np.pi / np.sqrt(24.0 * m))
    return MemoryEstimate(d_hat, se, m, q)
