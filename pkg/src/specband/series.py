"""Time-series container, CSV ingestion and elementary transforms.

A :class:`TimeSeries` is an ordered, regularly spaced batch of real
observations.  Timestamps are either integer tick indices or ISO-8601
dates/datetimes (stored as ``numpy.datetime64``); they must be strictly
increasing and the values must be finite.  All operations here are pure:
they return new instances and never mutate their inputs.
"""

import csv
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import ValidationError

_MOD = "series"

# Direct convolution below this length keeps exact-zero filter taps exact
# (e.g. d=1 reduces to a clean first difference); FFT is used above it.
_FFT_CONV_MIN = 512


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Ordered, regularly spaced observations.

    Parameters
    ----------
    timestamps : ndarray
        int64 tick indices or datetime64 instants, strictly increasing.
    values : ndarray
        float64 observations, no NaN/inf, length >= 2.
    units : str
        free-form tag carried through transforms ("log-price", "variance", ...).
    spacing : float
        declared sampling interval in whatever unit the caller works in.
    """

    timestamps: np.ndarray
    values: np.ndarray
    units: str = ""
    spacing: float = 1.0

    def __post_init__(self):
        ts = np.asarray(self.timestamps)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or ts.ndim != 1:
            raise ValidationError("timestamps and values must be 1-D", module=_MOD)
        if len(vals) != len(ts):
            raise ValidationError("timestamps/values length mismatch", module=_MOD)
        if len(vals) < 2:
            raise ValidationError("series needs at least 2 observations", module=_MOD)
        if not np.all(np.isfinite(vals)):
            raise ValidationError("non-finite value in series", module=_MOD)
        if np.any(ts[1:] <= ts[:-1]):
            raise ValidationError("unsorted timestamps", module=_MOD)
        object.__setattr__(self, "timestamps", _freeze(ts))
        object.__setattr__(self, "values", _freeze(vals))

    def __len__(self):
        return len(self.values)

    def with_values(self, values, units=None) -> "TimeSeries":
        """Same time axis, new values."""
        return TimeSeries(self.timestamps, values,
                          self.units if units is None else units, self.spacing)


@dataclass(frozen=True)
class ReturnSeries:
    """Log-returns over the parent's declared spacing (length = parent - 1)."""

    timestamps: np.ndarray
    values: np.ndarray
    parent_units: str = ""
    spacing: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        ts = np.asarray(self.timestamps)
        if len(vals) != len(ts):
            raise ValidationError("timestamps/values length mismatch", module=_MOD)
        if not np.all(np.isfinite(vals)):
            raise ValidationError("non-finite return", module=_MOD)
        object.__setattr__(self, "timestamps", _freeze(ts))
        object.__setattr__(self, "values", _freeze(vals))

    def __len__(self):
        return len(self.values)


def _parse_timestamp_column(raw, path):
    """Integer tick indices when every entry parses as int, else ISO dates."""
    try:
        return np.array([int(s) for s in raw], dtype=np.int64)
    except ValueError:
        pass
    try:
        return np.array(raw, dtype="datetime64[s]")
    except ValueError as exc:
        raise ValidationError(f"{path}: unparseable timestamp ({exc})", module=_MOD)


def load_csv(path, time_col=None, value_col=None, units="", spacing=1.0) -> TimeSeries:
    """Read one series from a headered CSV file.

    ``time_col``/``value_col`` name the columns to use; by default the
    first column is the timestamp and the second the value.  Rows with
    unparseable numerics raise, they are never dropped silently.
    """
    if not os.path.exists(path):
        raise ValidationError(f"no such file: {path}", module=_MOD)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file", module=_MOD)
        header = [h.strip() for h in header]
        t_idx = 0 if time_col is None else _col_index(header, time_col, path)
        v_idx = 1 if value_col is None else _col_index(header, value_col, path)
        if max(t_idx, v_idx) >= len(header):
            raise ValidationError(f"{path}: fewer than two columns", module=_MOD)
        raw_t, raw_v = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                raw_v.append(float(row[v_idx]))
            except (ValueError, IndexError):
                raise ValidationError(
                    f"{path}:{lineno}: non-numeric value {row[v_idx] if v_idx < len(row) else '<missing>'!r}",
                    module=_MOD)
            raw_t.append(row[t_idx].strip())
    ts = _parse_timestamp_column(raw_t, path)
    vals = np.asarray(raw_v, dtype=float)
    if len(vals) >= 2 and np.any(ts[1:] <= ts[:-1]):
        raise ValidationError(f"{path}: unsorted timestamps", module=_MOD)
    return TimeSeries(ts, vals, units=units, spacing=spacing)


def _col_index(header, name, path):
    try:
        return header.index(name)
    except ValueError:
        raise ValidationError(f"{path}: missing column {name!r}", module=_MOD)


def write_csv(series: TimeSeries, path, time_col="timestamp", value_col="value"):
    """Write a series as a two-column CSV.

    Values are formatted with ``repr`` so a reload reproduces the exact
    float64 bit patterns.
    """
    ts = series.timestamps
    iso = np.issubdtype(ts.dtype, np.datetime64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([time_col, value_col])
        for t, v in zip(ts, series.values):
            stamp = np.datetime_as_string(t) if iso else str(int(t))
            writer.writerow([stamp, repr(float(v))])


def log_returns(series: TimeSeries) -> ReturnSeries:
    """Log-returns of a price series: r[i] = ln(p[i+1]) - ln(p[i])."""
    if np.any(series.values <= 0):
        raise ValidationError("non-positive price in series", module=_MOD)
    logp = np.log(series.values)
    return ReturnSeries(series.timestamps[1:], np.diff(logp),
                        parent_units=series.units, spacing=series.spacing)


def frac_diff_values(values: np.ndarray, d: float) -> np.ndarray:
    """Apply (1-L)**d to a bare array via the truncated binomial expansion.

    Coefficients follow pi_0 = 1, pi_k = pi_{k-1} * (k - 1 - d) / k and the
    output keeps the input length:  y_t = sum_{k<=t} pi_k * x_{t-k}.  Early
    indices are partial sums of the infinite expansion, so for non-integer
    d the leading stretch of the output is a low-accuracy burn-in.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if d == 0.0:
        return x.copy()
    k = np.arange(1, n, dtype=float)
    pi = np.empty(n)
    pi[0] = 1.0
    pi[1:] = np.cumprod((k - 1.0 - d) / k)
    if n >= _FFT_CONV_MIN:
        out = fftconvolve(x, pi)[:n]
    else:
        out = np.convolve(x, pi)[:n]
    return out


def frac_diff(series: TimeSeries, d: float) -> TimeSeries:
    """Fractional difference of order ``d`` (|d| <= 2), same length as input."""
    if abs(d) > 2:
        raise ValidationError("fractional order must satisfy |d| <= 2", module=_MOD)
    return series.with_values(frac_diff_values(series.values, d))


def demean(series: TimeSeries) -> TimeSeries:
    """Subtract the sample mean."""
    return series.with_values(series.values - series.values.mean())


def aggregate_interval(daily: TimeSeries, windows) -> TimeSeries:
    """Sum daily variances over non-overlapping calendar windows.

    ``windows`` is a sequence of inclusive ``(start, end)`` pairs in the
    same timestamp type as the series.  Variance is additive over disjoint
    intervals, so each output value is the plain sum of the dailies the
    window covers.  A window that covers no observation is an error.
    """
    ts = daily.timestamps
    out_vals, out_ts = [], []
    prev_end = None
    for start, end in windows:
        start = np.asarray(start, dtype=ts.dtype)[()]
        end = np.asarray(end, dtype=ts.dtype)[()]
        if end < start:
            raise ValidationError(f"window end {end} before start {start}", module=_MOD)
        if prev_end is not None and start <= prev_end:
            raise ValidationError("overlapping aggregation windows", module=_MOD)
        mask = (ts >= start) & (ts <= end)
        if not mask.any():
            raise ValidationError(f"window [{start}, {end}] covers no data", module=_MOD)
        out_vals.append(daily.values[mask].sum())
        out_ts.append(end)
        prev_end = end
    if len(out_vals) < 2:
        # Container demands length >= 2; pad semantics are not wanted here,
        # so return a 1-window result through a bare array when needed.
        raise ValidationError("need at least two windows to form a series; "
                              "use aggregate_window_sums for fewer", module=_MOD)
    return TimeSeries(np.array(out_ts), np.array(out_vals),
                      units=daily.units, spacing=daily.spacing)


def aggregate_window_sums(daily: TimeSeries, windows) -> np.ndarray:
    """Like :func:`aggregate_interval` but returns a bare array (any count)."""
    ts = daily.timestamps
    sums = []
    prev_end = None
    for start, end in windows:
        start = np.asarray(start, dtype=ts.dtype)[()]
        end = np.asarray(end, dtype=ts.dtype)[()]
        if end < start:
            raise ValidationError(f"window end {end} before start {start}", module=_MOD)
        if prev_end is not None and start <= prev_end:
            raise ValidationError("overlapping aggregation windows", module=_MOD)
        mask = (ts >= start) & (ts <= end)
        if not mask.any():
            raise ValidationError(f"window [{start}, {end}] covers no data", module=_MOD)
        sums.append(daily.values[mask].sum())
        prev_end = end
    return np.asarray(sums)
