"""Maximal overlap discrete wavelet transform (MODWT).

Implements the circular pyramid algorithm with stretched filters, the
level-wise energy decomposition, squared gain functions, and biased /
unbiased wavelet variance and covariance estimators.  Circular (mod T)
boundary treatment is used throughout because the energy identity

    ||X||^2 = sum_j ||W_j||^2 + ||V_J||^2

is exact only under circular filtering.  Unbiased estimators discard the
L_j - 1 boundary-affected coefficients, where L_j = (2^j - 1)(L - 1) + 1
is the level-j equivalent filter width.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .series import TimeSeries

_MOD = "modwt"

_SQRT2 = np.sqrt(2.0)
_SQRT3 = np.sqrt(3.0)

# Unit-norm (DWT) scaling filters; the MODWT versions are these / sqrt(2).
# D4 is closed-form; LA8 was Newton-polished so that every orthonormality
# identity holds to ~1e-16 in float64.
_DWT_SCALING = {
    "haar": np.array([1.0 / _SQRT2, 1.0 / _SQRT2]),
    "d4": np.array([(1.0 + _SQRT3) / (4.0 * _SQRT2),
                    (3.0 + _SQRT3) / (4.0 * _SQRT2),
                    (3.0 - _SQRT3) / (4.0 * _SQRT2),
                    (1.0 - _SQRT3) / (4.0 * _SQRT2)]),
    "la8": np.array([-0.07576571478950221,
                     -0.029635527646002493,
                     0.497618667632775,
                     0.8037387518051321,
                     0.29785779560530606,
                     -0.09921954357663353,
                     -0.012603967262031304,
                     0.032223100604051466]),
}

_ALIASES = {"haar": "haar", "d4": "d4", "db2": "d4", "la8": "la8", "sym4": "la8"}


@dataclass(frozen=True)
class FilterPair:
    """MODWT scaling (g) and wavelet (h) filters of a given family.

    Satisfies sum(h) = 0, sum(h^2) = 1/2, sum(g) = 1, sum(g^2) = 1/2 and
    even-shift orthogonality for both filters.
    """

    family: str
    g: np.ndarray
    h: np.ndarray

    @property
    def length(self) -> int:
        return len(self.g)

    def equivalent_width(self, level: int) -> int:
        """L_j = (2^j - 1)(L - 1) + 1."""
        return (2 ** level - 1) * (self.length - 1) + 1


def make_filter(family: str) -> FilterPair:
    """Build the MODWT filter pair for 'haar', 'd4' or 'la8'."""
    key = _ALIASES.get(str(family).lower())
    if key is None:
        raise ValidationError(f"unsupported wavelet family: {family!r}", module=_MOD)
    g_dwt = _DWT_SCALING[key]
    L = len(g_dwt)
    # quadrature mirror: h_l = (-1)^l g_{L-1-l}
    h_dwt = ((-1.0) ** np.arange(L)) * g_dwt[::-1]
    g = g_dwt / _SQRT2
    h = h_dwt / _SQRT2
    g.setflags(write=False)
    h.setflags(write=False)
    return FilterPair(key, g, h)


HAAR = make_filter("haar")
D4 = make_filter("d4")
LA8 = make_filter("la8")


@dataclass(frozen=True)
class ModwtDecomp:
    """Level-by-level MODWT coefficients of one series.

    Attributes
    ----------
    W : ndarray, shape (J, T)
        wavelet coefficients; row j-1 covers frequency band
        [1/2^(j+1), 1/2^j].
    V : ndarray, shape (T,)
        level-J scaling coefficients (band [0, 1/2^(J+1)]).
    filter : FilterPair
    boundary_counts : ndarray, shape (J,)
        M_j = T - L_j + 1 boundary-free coefficients per level (may be <= 0
        for short series).
    input_energy : float
        ||X||^2 of the transformed series, kept for the energy identity.
    """

    W: np.ndarray
    V: np.ndarray
    filter: FilterPair
    boundary_counts: np.ndarray
    input_energy: float

    @property
    def levels(self) -> int:
        return self.W.shape[0]

    @property
    def length(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class ScaleEstimate:
    """A wavelet variance/covariance estimate at one level."""

    level: int
    value: float
    count_used: int
    biased: bool


def _filter_step(v: np.ndarray, taps: np.ndarray, stride: int) -> np.ndarray:
    """Circular filtering with taps spaced ``stride`` apart, along axis -1."""
    out = taps[0] * v
    for l in range(1, len(taps)):
        out = out + taps[l] * np.roll(v, stride * l, axis=-1)
    return out


def pyramid(values: np.ndarray, filt: FilterPair, levels: int):
    """Run the circular MODWT pyramid along the last axis.

    Accepts 1-D series or a (batch, T) stack.  Returns (W_list, V_list)
    where W_list[j-1] / V_list[j-1] hold the level-j wavelet and scaling
    coefficients; the stage-j filters insert 2^(j-1) - 1 zeros between taps.
    """
    x = np.asarray(values, dtype=float)
    T = x.shape[-1]
    if levels < 1:
        raise ValidationError("levels must be >= 1", module=_MOD)
    if 2 ** levels > T:
        raise ValidationError(
            f"levels={levels} too large for series of length {T}", module=_MOD)
    if T < filt.length:
        raise ValidationError("series shorter than the wavelet filter", module=_MOD)
    W_list, V_list = [], []
    v = x
    for j in range(1, levels + 1):
        stride = 2 ** (j - 1)
        W_list.append(_filter_step(v, filt.h, stride))
        v = _filter_step(v, filt.g, stride)
        V_list.append(v)
    return W_list, V_list


def modwt(series, levels: int, filt: FilterPair = D4) -> ModwtDecomp:
    """MODWT of a series (or bare array) to ``levels`` scales."""
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    W_list, V_list = pyramid(values, filt, levels)
    T = len(values)
    M = np.array([T - filt.equivalent_width(j) + 1 for j in range(1, levels + 1)])
    W = np.vstack(W_list)
    W.setflags(write=False)
    V = V_list[-1]
    V.setflags(write=False)
    return ModwtDecomp(W, V, filt, M, float((values ** 2).sum()))


def squared_gain(filt: FilterPair, level: int, f) -> np.ndarray:
    """Squared gain |H_j(f)|^2 of the level-j equivalent wavelet filter.

    Uses the product form H_j(f) = H(2^(j-1) f) * prod_{l<j-1} G(2^l f),
    with H, G the transfer functions of the base MODWT filters.  ``f`` is
    a frequency (or array of frequencies) in [0, 1/2].
    """
    f = np.asarray(f, dtype=float)
    if np.any((f < 0) | (f > 0.5)):
        raise ValidationError("frequency must lie in [0, 1/2]", module=_MOD)
    if level < 1:
        raise ValidationError("level must be >= 1", module=_MOD)
    l_idx = np.arange(filt.length)

    def transfer(taps, freq):
        phase = np.exp(-2j * np.pi * np.multiply.outer(freq, l_idx))
        return phase @ taps

    resp = transfer(filt.h, (2 ** (level - 1)) * f)
    for l in range(level - 1):
        resp = resp * transfer(filt.g, (2 ** l) * f)
    return np.abs(resp) ** 2


def energy_report(decomp: ModwtDecomp) -> dict:
    """Per-level energies and the energy-identity residual.

    The MODWT is energy preserving under circular filtering, so the
    relative residual should sit at float64 noise for any input.  Returns
    keys: 'wavelet' (per-level ||W_j||^2), 'scaling' (||V_J||^2), 'total'
    (their sum), 'input' (||X||^2) and 'relative_residual'.
    """
    wav = (decomp.W ** 2).sum(axis=1)
    scal = float((decomp.V ** 2).sum())
    total = float(wav.sum() + scal)
    if decomp.input_energy == 0.0:
        residual = abs(total)
    else:
        residual = abs(total - decomp.input_energy) / decomp.input_energy
    return {"wavelet": wav, "scaling": scal, "total": total,
            "input": decomp.input_energy, "relative_residual": residual}


def wavelet_variance(decomp: ModwtDecomp, level: int, unbiased: bool = False) -> ScaleEstimate:
    """Wavelet variance at one level: the mean of squared coefficients.

    The biased form averages over all T coefficients; the unbiased form
    averages only over the M_j coefficients free of circular boundary
    effects and raises when M_j <= 0.
    """
    _check_level(decomp, level)
    w = decomp.W[level - 1]
    return _scale_estimate(w, w, decomp, level, unbiased)


def wavelet_covariance(decomp_x: ModwtDecomp, decomp_y: ModwtDecomp, level: int,
                       unbiased: bool = False) -> ScaleEstimate:
    """Wavelet covariance of two same-shape decompositions at one level."""
    _check_pair(decomp_x, decomp_y)
    _check_level(decomp_x, level)
    return _scale_estimate(decomp_x.W[level - 1], decomp_y.W[level - 1],
                           decomp_x, level, unbiased)


def scaling_variance(decomp: ModwtDecomp, unbiased: bool = False) -> ScaleEstimate:
    """Variance of the level-J scaling coefficients (band [0, 1/2^(J+1)])."""
    return _scale_estimate(decomp.V, decomp.V, decomp, decomp.levels, unbiased)


def scaling_covariance(decomp_x: ModwtDecomp, decomp_y: ModwtDecomp,
                       unbiased: bool = False) -> ScaleEstimate:
    _check_pair(decomp_x, decomp_y)
    return _scale_estimate(decomp_x.V, decomp_y.V, decomp_x, decomp_x.levels, unbiased)


def _scale_estimate(a, b, decomp, level, unbiased):
    T = decomp.length
    if unbiased:
        m = int(decomp.boundary_counts[level - 1])
        if m <= 0:
            raise ValidationError(
                f"no boundary-free coefficients at level {level} (M_j <= 0)",
                module=_MOD)
        start = decomp.filter.equivalent_width(level) - 1
        value = float((a[start:] * b[start:]).sum() / m)
        return ScaleEstimate(level, value, m, biased=False)
    value = float((a * b).sum() / T)
    return ScaleEstimate(level, value, T, biased=True)


def _check_level(decomp, level):
    if not 1 <= level <= decomp.levels:
        raise ValidationError(f"level {level} outside 1..{decomp.levels}", module=_MOD)


def _check_pair(dx, dy):
    if dx.W.shape != dy.W.shape:
        raise ValidationError("decompositions have different shapes", module=_MOD)
    if dx.filter.family != dy.filter.family:
        raise ValidationError("decompositions use different filters", module=_MOD)


def decomp_to_csv(decomp: ModwtDecomp, path):
    """Export as rows (level, position, coefficient_type, value)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "position", "coefficient_type", "value"])
        for j in range(1, decomp.levels + 1):
            for s, w in enumerate(decomp.W[j - 1]):
                writer.writerow([j, s, "W", repr(float(w))])
        for s, v in enumerate(decomp.V):
            writer.writerow([decomp.levels, s, "V", repr(float(v))])
