"""Synthetic-data generators with exact ground truth.

Every generator is deterministic given (parameters, seed): random numbers
come from counter-based Philox streams, so replication k of a Monte Carlo
study can be produced independently of every other replication.  Each
generator records the quantities an estimator is supposed to recover
(memory orders, regression coefficients, integrated variance, jump
times/sizes), making them usable as oracles in tests.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .options import CALL, PUT, OptionChain, bs_price
from .rng import stream_rng
from .series import TimeSeries, frac_diff_values

_MOD = "simulate"

#: samples generated and discarded ahead of every fractional series
BURN_IN = 200


def sim_arfima(d: float, n: int, innovation_sd: float = 1.0, seed: int = 0) -> TimeSeries:
    """Fractionally integrated Gaussian noise of memory order ``d``.

    Gaussian innovations are passed through the truncated MA expansion of
    (1-L)^(-d); the first BURN_IN samples are dropped.  |d| < 0.5 gives the
    stationary branch, values up to 1 produce the nonstationary extension
    of the same recursion.
    """
    if abs(d) > 1:
        raise ValidationError("memory order must satisfy |d| <= 1", module=_MOD)
    if n < 2:
        raise ValidationError("need n >= 2", module=_MOD)
    rng = stream_rng(seed, 0)
    eps = rng.normal(0.0, innovation_sd, size=n + BURN_IN)
    x = frac_diff_values(eps, -d)[BURN_IN:]
    return TimeSeries(np.arange(n, dtype=np.int64), x, units="sim-arfima")


@dataclass(frozen=True)
class FcointTruth:
    """Parameters behind one fractional-cointegration draw."""

    alpha: float
    beta: float
    d: float
    d_u: float
    rho: float
    u_sd: float
    seed: int


def sim_fcoint(beta: float = 1.0, alpha: float = 0.0, d: float = 0.4,
               d_u: float = 0.0, rho: float = 0.0, n: int = 1024,
               u_sd: float = 1.0, seed: int = 0):
    """Fractionally cointegrated pair y = alpha + beta*x + u.

    x is I(d); the error u is I(d_u) with innovations correlated ``rho``
    against x's innovations (u_sd = 0 collapses to an exact linear
    relation).  Requires 0 <= d_u < d < 1.

    Returns (x, y, truth).
    """
    if not (0.0 <= d_u < d < 1.0):
        raise ValidationError("need 0 <= d_u < d < 1", module=_MOD)
    if not -1.0 <= rho <= 1.0:
        raise ValidationError("correlation must lie in [-1, 1]", module=_MOD)
    eps_x = stream_rng(seed, 0).normal(size=n + BURN_IN)
    eta = stream_rng(seed, 1).normal(size=n + BURN_IN)
    eps_u = rho * eps_x + math.sqrt(1.0 - rho * rho) * eta
    x = frac_diff_values(eps_x, -d)[BURN_IN:]
    u = u_sd * frac_diff_values(eps_u, -d_u)[BURN_IN:]
    y = alpha + beta * x + u
    ts = np.arange(n, dtype=np.int64)
    return (TimeSeries(ts, x, units="sim-x"),
            TimeSeries(ts, y, units="sim-y"),
            FcointTruth(alpha, beta, d, d_u, rho, u_sd, seed))


@dataclass(frozen=True)
class JumpDiffusionSpec:
    """Parameters of the one-day jump-diffusion tick generator.

    mu and sigma are annualized; ``lam`` is the expected jump count per
    day, jump sizes are N(xi_mean, xi_sd^2), ``eta`` the i.i.d. noise
    standard deviation added to the latent log price, ``n`` the number of
    tick increments per day (so a path carries n + 1 prices), and
    ``day_fraction`` the year fraction one day spans.  sigma may be a
    scalar or a length-n array (a spot-volatility path).
    """

    mu: float = 0.0
    sigma: float | np.ndarray = 0.2
    lam: float = 0.0
    xi_mean: float = 0.0
    xi_sd: float = 0.0
    eta: float = 0.0
    n: int = 23400
    day_fraction: float = 1.0 / 252.0
    p0: float = math.log(100.0)
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("need at least 2 ticks", module=_MOD)
        if np.any(np.asarray(self.sigma) <= 0):
            raise ValidationError("sigma must be positive", module=_MOD)
        if self.lam < 0 or self.eta < 0 or self.xi_sd < 0:
            raise ValidationError("lam, eta and xi_sd must be nonnegative", module=_MOD)


@dataclass(frozen=True)
class PathRecord:
    """One simulated day: observed prices plus exact truth fields."""

    observed: TimeSeries          # log prices y = p + noise
    latent: TimeSeries            # jump-diffusion log prices p
    integrated_variance: float
    jump_times: np.ndarray        # tick indices (first tick after each jump)
    jump_sizes: np.ndarray
    jump_variation: float

    @property
    def quadratic_variation(self) -> float:
        return self.integrated_variance + self.jump_variation


def sim_jump_diffusion(spec: JumpDiffusionSpec) -> PathRecord:
    """Euler-discretized jump diffusion with additive microstructure noise.

    The day is split into ``n`` increments of dt = day_fraction / n,
    giving n + 1 prices.  Jumps arrive with a Poisson(lam) daily count at
    uniform tick positions; the integrated variance sum(sigma_k^2 * dt)
    and the jump variation sum(xi^2) are recorded exactly from the draw.
    Recorded jump times index the first price that includes each jump.
    """
    n = spec.n
    dt = spec.day_fraction / n
    sigma = np.broadcast_to(np.asarray(spec.sigma, dtype=float), (n,))
    rng = stream_rng(spec.seed, 0)
    increments = spec.mu * dt + sigma * math.sqrt(dt) * rng.normal(size=n)
    n_jumps = int(stream_rng(spec.seed, 1).poisson(spec.lam))
    jump_times = np.sort(stream_rng(spec.seed, 2).integers(1, n + 1, size=n_jumps))
    jump_sizes = stream_rng(spec.seed, 3).normal(spec.xi_mean, spec.xi_sd, size=n_jumps)
    jumps = np.zeros(n)
    np.add.at(jumps, jump_times - 1, jump_sizes)
    p = spec.p0 + np.concatenate(([0.0], np.cumsum(increments + jumps)))
    noise = spec.eta * stream_rng(spec.seed, 4).normal(size=n + 1) if spec.eta > 0 else 0.0
    y = p + noise
    ts = np.arange(n + 1, dtype=np.int64)
    iv = float((sigma ** 2).sum() * dt)
    return PathRecord(
        observed=TimeSeries(ts, y, units="log-price"),
        latent=TimeSeries(ts, p, units="log-price"),
        integrated_variance=iv,
        jump_times=jump_times,
        jump_sizes=jump_sizes,
        jump_variation=float((jump_sizes ** 2).sum()),
    )


def sim_bs_chain(forward: float = 100.0, sigma: float = 0.2, tau: float = 30.0 / 365.0,
                 strike_lo: float = 60.0, strike_hi: float = 140.0, step: float = 1.0,
                 rate: float = 0.0, quote_date: str = "2020-01-01") -> OptionChain:
    """Black-model option chain at a single constant volatility.

    OTM convention: calls for K >= F, puts for K < F, all priced exactly
    by the Black formula; spot is back-filled as F * exp(-r * tau).
    """
    if not (0 < strike_lo < forward < strike_hi):
        raise ValidationError("need 0 < strike_lo < forward < strike_hi", module=_MOD)
    if sigma <= 0 or tau <= 0 or step <= 0:
        raise ValidationError("sigma, tau and step must be positive", module=_MOD)
    strikes = np.arange(strike_lo, strike_hi + step / 2, step)
    types = np.where(strikes >= forward, CALL, PUT)
    mids = np.array([bs_price(forward, K, sigma, tau, t)
                     for K, t in zip(strikes, types)])
    expiry_days = int(round(tau * 365.0))
    expiry = str(np.datetime64(quote_date, "D") + np.timedelta64(expiry_days, "D"))
    return OptionChain(quote_date, expiry, tau, strikes, types, mids,
                       spot=forward * math.exp(-rate * tau), rate=rate)
