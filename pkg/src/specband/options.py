"""Option-chain filtering, Black price/vol mapping and implied variance.

All pricing is undiscounted Black on the forward (the risk-free rate only
enters through the spot -> forward conversion carried by the chain), so
the formula acts purely as a one-to-one map between prices and vols.
Model-free implied variance integrates 2*(C(K) - intrinsic)/K^2 with the
trapezoid rule on an integer-strike grid; corridor variance restricts the
same integral between two barriers, optionally placed at quantiles of the
risk-neutral density recovered from strike-curvature of call prices.
"""

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import ndtr

from .errors import NumericError, ValidationError

_MOD = "implied-vol"

CALL = "C"
PUT = "P"


@dataclass(frozen=True)
class OptionChain:
    """One maturity's worth of quotes plus the underlying state.

    strikes/types/mids are parallel arrays; ``tau`` is the year fraction
    to expiry and ``forward`` is S * exp(r_f * tau).
    """

    quote_date: str
    expiry: str
    tau: float
    strikes: np.ndarray
    types: np.ndarray
    mids: np.ndarray
    spot: float
    rate: float

    def __post_init__(self):
        k = np.asarray(self.strikes, dtype=float)
        m = np.asarray(self.mids, dtype=float)
        t = np.asarray(self.types)
        if not (len(k) == len(m) == len(t)):
            raise ValidationError("chain arrays must be parallel", module=_MOD)
        if np.any(k <= 0):
            raise ValidationError("strikes must be positive", module=_MOD)
        if self.tau <= 0:
            raise ValidationError("tau must be positive", module=_MOD)
        if self.spot <= 0:
            raise ValidationError("spot must be positive", module=_MOD)
        for arr, name in ((k, "strikes"), (m, "mids"), (t, "types")):
            arr = np.array(arr, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def forward(self) -> float:
        return self.spot * math.exp(self.rate * self.tau)

    def __len__(self):
        return len(self.strikes)


def bs_price(forward, strike, sigma, tau, opt_type=CALL):
    """Undiscounted Black price of a European option on the forward."""
    F = np.asarray(forward, dtype=float)
    K = np.asarray(strike, dtype=float)
    sig = np.asarray(sigma, dtype=float)
    if np.any(F <= 0) or np.any(K <= 0) or tau <= 0:
        raise ValidationError("forward, strike and tau must be positive", module=_MOD)
    if np.any(sig < 0):
        raise ValidationError("volatility must be nonnegative", module=_MOD)
    vol = sig * math.sqrt(tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = np.where(vol > 0, (np.log(F / K) + 0.5 * vol ** 2) / np.where(vol > 0, vol, 1.0), 0.0)
    d2 = d1 - vol
    call = np.where(vol > 0, F * ndtr(d1) - K * ndtr(d2), np.maximum(F - K, 0.0))
    if opt_type == CALL:
        out = call
    elif opt_type == PUT:
        out = call - F + K          # parity with zero rate on the forward
    else:
        raise ValidationError(f"unknown option type {opt_type!r}", module=_MOD)
    return out if out.shape else float(out)


def bs_implied_vol(price, forward, strike, tau, opt_type=CALL,
                   tol: float = 1e-10, lo: float = 1e-6, hi: float = 5.0) -> float:
    """Invert the Black formula by bisection on sigma in [lo, hi].

    The price must lie inside the no-arbitrage bounds for the type:
    calls in [max(0, F-K), F), puts in [max(0, K-F), K).
    """
    price = float(price)
    F, K = float(forward), float(strike)
    intrinsic = max(F - K, 0.0) if opt_type == CALL else max(K - F, 0.0)
    upper = F if opt_type == CALL else K
    if not intrinsic <= price < upper:
        raise ValidationError(
            f"price {price} outside no-arbitrage bounds [{intrinsic}, {upper})",
            module=_MOD)
    f_lo = bs_price(F, K, lo, tau, opt_type) - price
    f_hi = bs_price(F, K, hi, tau, opt_type) - price
    if f_lo > 0 and f_lo > tol:
        raise NumericError("price below the sigma lower-bracket value", module=_MOD)
    if f_hi < 0:
        raise NumericError("price above the sigma upper-bracket value", module=_MOD)
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = bs_price(F, K, mid, tau, opt_type) - price
        if abs(fm) < tol:
            return mid
        if fm > 0:
            b = mid
        else:
            a = mid
        if b - a < 1e-16:
            break
    return 0.5 * (a + b)


def filter_chain(raw: OptionChain, min_days: float = 7.0, min_price: float = 0.375,
                 min_count: int = 6) -> OptionChain:
    """Apply the liquidity/arbitrage exclusion filters to a chain.

    Drops quotes that (a) expire in under ``min_days`` calendar days,
    (b) cost less than ``min_price``, (c) violate the no-arbitrage bound
    against spot, or (d) are in the money (calls keep K > S, puts K < S).
    Raises when fewer than ``min_count`` quotes survive.  Filtering twice
    is a no-op.
    """
    if raw.tau < min_days / 365.0:
        raise ValidationError(
            f"maturity of {raw.tau * 365.0:.1f} days is below the "
            f"{min_days}-day minimum", module=_MOD)
    S = raw.spot
    K, ty, mid = raw.strikes, raw.types, raw.mids
    keep = mid >= min_price
    is_call = ty == CALL
    intrinsic = np.where(is_call, np.maximum(S - K, 0.0), np.maximum(K - S, 0.0))
    keep &= mid >= intrinsic
    keep &= np.where(is_call, K > S, K < S)
    if keep.sum() < min_count:
        raise ValidationError(
            f"only {int(keep.sum())} quotes survive the filters "
            f"(need {min_count})", module=_MOD)
    return replace(raw, strikes=K[keep], types=ty[keep], mids=mid[keep])


@dataclass(frozen=True)
class VolCurve:
    """Strike-indexed implied-vol smile with flat extrapolation."""

    strikes: np.ndarray
    vols: np.ndarray
    forward: float
    tau: float

    def __post_init__(self):
        k = np.asarray(self.strikes, dtype=float)
        v = np.asarray(self.vols, dtype=float)
        if len(k) != len(v) or len(k) < 2:
            raise ValidationError("need at least two (strike, vol) knots", module=_MOD)
        if np.any(np.diff(k) <= 0):
            raise ValidationError("knot strikes must be strictly increasing", module=_MOD)
        if np.any(v <= 0):
            raise ValidationError("knot vols must be positive", module=_MOD)
        k.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "strikes", k)
        object.__setattr__(self, "vols", v)
        object.__setattr__(self, "_spline", CubicSpline(k, v, bc_type="natural"))

    @property
    def k_min(self) -> float:
        return float(self.strikes[0])

    @property
    def k_max(self) -> float:
        return float(self.strikes[-1])

    def vol(self, strike):
        """Interpolated vol; queries beyond the knots return the edge vol."""
        q = np.clip(np.asarray(strike, dtype=float), self.k_min, self.k_max)
        out = self._spline(q)
        return out if out.shape else float(out)

    def call_price(self, strike):
        """Black call price at the curve's vol (mapping only, no model claim)."""
        return bs_price(self.forward, strike, self.vol(strike), self.tau, CALL)


def fit_vol_curve(chain: OptionChain) -> VolCurve:
    """Natural cubic spline through the chain's implied vols.

    Every quote (OTM puts included) is inverted with the matching Black
    formula; the knots must resolve to distinct strikes.
    """
    if len(chain) < 6:
        raise ValidationError("need at least 6 filtered quotes to fit a smile",
                              module=_MOD)
    F, tau = chain.forward, chain.tau
    vols = np.empty(len(chain))
    for i, (K, ty, mid) in enumerate(zip(chain.strikes, chain.types, chain.mids)):
        vols[i] = bs_implied_vol(mid, F, K, tau, str(ty))
    order = np.argsort(chain.strikes)
    strikes = chain.strikes[order]
    if np.any(np.diff(strikes) == 0):
        raise ValidationError("duplicate strikes in chain", module=_MOD)
    return VolCurve(strikes, vols[order], F, tau)


def _variance_integral(curve: VolCurve, lo: float, hi: float, step: float = 1.0) -> float:
    """Trapezoid of 2*(C(K) - max(0, F-K))/K^2 over [lo, hi].

    The integrand is sampled on the fixed grid of ``step`` multiples and
    treated as piecewise linear between those nodes; barriers falling
    inside a cell contribute the exactly prorated slice of that cell.
    Integrating a fixed nonnegative piecewise-linear function makes the
    result exactly monotone under corridor widening.
    """
    if hi <= lo:
        raise ValidationError("empty integration range", module=_MOD)
    lo = max(lo, step)          # the integrand decays fast; K=0 is excluded
    if hi <= lo:
        raise ValidationError("integration range collapsed below one strike step",
                              module=_MOD)
    nodes = np.arange(math.floor(lo / step) * step,
                      math.ceil(hi / step) * step + step / 2, step)
    intrinsic = np.maximum(curve.forward - nodes, 0.0)
    f_nodes = 2.0 * (np.asarray(curve.call_price(nodes)) - intrinsic) / nodes ** 2
    f_nodes = np.maximum(f_nodes, 0.0)   # clip float noise at deep ITM strikes
    interior = nodes[(nodes > lo) & (nodes < hi)]
    grid = np.concatenate(([lo], interior, [hi]))
    vals = np.interp(grid, nodes, f_nodes)
    return float(np.trapezoid(vals, grid))


def mfiv(curve: VolCurve, sd_mult: float = 1.0) -> float:
    """Model-free implied variance over +/- sd_mult ATM standard deviations.

    The range is F0 * (1 +/- sd_mult * sigma_atm * sqrt(tau)), integrated
    on the unit-strike grid.  The default one-SD truncation is downward
    biased by construction; pass a larger multiple for wide-range checks.
    """
    if sd_mult <= 0:
        raise ValidationError("sd_mult must be positive", module=_MOD)
    F = curve.forward
    sd = float(curve.vol(F)) * math.sqrt(curve.tau)
    lo = F * (1.0 - sd_mult * sd)
    hi = F * (1.0 + sd_mult * sd)
    return _variance_integral(curve, lo, hi)


@dataclass(frozen=True)
class CorridorSpec:
    """Corridor barriers: absolute strike levels or RND percentile pair."""

    lo: float
    hi: float
    kind: str = "absolute"

    def __post_init__(self):
        if self.kind not in ("absolute", "percentile"):
            raise ValidationError(f"unknown corridor kind {self.kind!r}", module=_MOD)
        if not 0 <= self.lo < self.hi:
            raise ValidationError("need 0 <= lo < hi", module=_MOD)
        if self.kind == "percentile" and not (0 < self.lo < self.hi < 1):
            raise ValidationError("percentiles must lie inside (0, 1)", module=_MOD)

    @classmethod
    def absolute(cls, b1: float, b2: float) -> "CorridorSpec":
        return cls(b1, b2, "absolute")

    @classmethod
    def percentile(cls, p1: float, p2: float) -> "CorridorSpec":
        return cls(p1, p2, "percentile")


CIV1 = CorridorSpec.percentile(0.05, 0.95)
CIV2 = CorridorSpec.percentile(0.025, 0.975)


def rnd_quantiles(curve: VolCurve, probs) -> np.ndarray:
    """Strikes at the given cumulative probabilities of the risk-neutral density.

    The density is the second finite difference of the call price on the
    unit-strike grid spanning the knot range extended to +/- 5 ATM SDs;
    negative curvature values are clipped to zero and the density is
    renormalized before the CDF is inverted by linear interpolation.
    """
    probs = np.asarray(probs, dtype=float)
    if np.any((probs <= 0) | (probs >= 1)):
        raise ValidationError("probabilities must lie inside (0, 1)", module=_MOD)
    if np.any(np.diff(probs) < 0):
        raise ValidationError("probabilities must be sorted", module=_MOD)
    F = curve.forward
    sd = float(curve.vol(F)) * math.sqrt(curve.tau)
    lo = min(curve.k_min, F * (1.0 - 5.0 * sd))
    hi = max(curve.k_max, F * (1.0 + 5.0 * sd))
    lo = max(1.0, math.floor(lo))
    hi = math.ceil(hi)
    K = np.arange(lo, hi + 1.0)
    C = np.asarray(curve.call_price(K))
    density = np.maximum(C[:-2] - 2.0 * C[1:-1] + C[2:], 0.0)
    mass = density.sum()
    if mass <= 0:
        raise NumericError("degenerate risk-neutral density (zero mass)", module=_MOD)
    # cumulative sums of curvature telescope to C'(K + 1/2), so the CDF
    # samples live half a grid step to the right of the density centers
    cdf = np.cumsum(density) / mass
    half_up = K[1:-1] + 0.5
    return np.interp(probs, cdf, half_up)


def civ(curve: VolCurve, corridor: CorridorSpec) -> float:
    """Corridor implied variance between two barriers.

    Percentile corridors are resolved to strikes through the RND first.
    With barriers pushed to the full integration range this reproduces
    :func:`mfiv` exactly (same grid, same integrand).
    """
    if corridor.kind == "percentile":
        b1, b2 = rnd_quantiles(curve, [corridor.lo, corridor.hi])
    else:
        b1, b2 = corridor.lo, corridor.hi
    if b2 <= b1:
        raise ValidationError("corridor resolved to an empty strike range", module=_MOD)
    return _variance_integral(curve, float(b1), float(b2))


def load_chain_csv(path):
    """Read option chains from CSV with columns
    (quote_date, expiry, strike, type, mid, spot, rate); one chain per
    (quote_date, expiry) pair, ordered by first appearance."""
    if not os.path.exists(path):
        raise ValidationError(f"no such file: {path}", module=_MOD)
    groups: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"quote_date", "expiry", "strike", "type", "mid", "spot", "rate"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValidationError(
                f"{path}: chain CSV needs columns {sorted(required)}", module=_MOD)
        for lineno, row in enumerate(reader, start=2):
            try:
                key = (row["quote_date"], row["expiry"])
                rec = (float(row["strike"]), row["type"].strip().upper(),
                       float(row["mid"]), float(row["spot"]), float(row["rate"]))
            except (ValueError, AttributeError):
                raise ValidationError(f"{path}:{lineno}: malformed chain row", module=_MOD)
            groups.setdefault(key, []).append(rec)
    chains = []
    for (qd, ex), recs in groups.items():
        strikes = np.array([r[0] for r in recs])
        types = np.array([r[1] for r in recs])
        mids = np.array([r[2] for r in recs])
        spot, rate = recs[0][3], recs[0][4]
        tau = _tau_years(qd, ex)
        chains.append(OptionChain(qd, ex, tau, strikes, types, mids, spot, rate))
    return chains


def _tau_years(quote_date: str, expiry: str) -> float:
    try:
        days = (np.datetime64(expiry, "D") - np.datetime64(quote_date, "D")) / np.timedelta64(1, "D")
        return float(days) / 365.0
    except ValueError:
        pass
    try:
        return (float(expiry) - float(quote_date)) / 365.0
    except ValueError:
        raise ValidationError(
            f"cannot parse dates {quote_date!r} -> {expiry!r}", module=_MOD)


def write_chain_csv(chain: OptionChain, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quote_date", "expiry", "strike", "type", "mid", "spot", "rate"])
        for K, ty, mid in zip(chain.strikes, chain.types, chain.mids):
            writer.writerow([chain.quote_date, chain.expiry, repr(float(K)),
                             str(ty), repr(float(mid)), repr(chain.spot),
                             repr(chain.rate)])
