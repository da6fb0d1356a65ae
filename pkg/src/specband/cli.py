"""Command line interface.

Subcommands: simulate {arfima|fcoint|jumpdiff|bschain}, modwt, coherence,
memory, regress, rv, iv.  Every artifact is written atomically (temp file
in the target directory, then rename); with a fixed --seed every output
is bitwise reproducible regardless of SPECBAND_THREADS.  Exit codes:
0 success, 1 validation error, 2 numeric failure.
"""

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import coherence as coh
from . import longmemory as lm
from . import options as opt
from . import realized as rv_mod
from . import regression as reg
from . import series as ser
from . import simulate as sim
from .errors import NumericError, SpecbandError, ValidationError
from .modwt import D4, HAAR, LA8, decomp_to_csv, energy_report
from .modwt import modwt as modwt_transform
from .plotting import emit_plot

_FILTERS = {"haar": HAAR, "d4": D4, "la8": LA8}


class _Parser(argparse.ArgumentParser):
    """argparse that reports flag errors through the library's exit codes."""

    def error(self, message):
        raise ValidationError(message, module="cli")


def _atomic_write(path, write_fn):
    tmp = f"{path}.tmp"
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _require_files(*paths):
    for p in paths:
        if p and not os.path.exists(p):
            raise ValidationError(f"input file not found: {p}", module="cli")


def _write_rows(path, header, rows):
    def write(tmp):
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    _atomic_write(path, write)


def _num(v):
    return "" if v is None else repr(float(v))


def _parse_band(spec_str, kind):
    if spec_str is None:
        return None
    if spec_str == "full":
        return None
    try:
        lo, hi = spec_str.split(":")
        if kind == "wavelet":
            return int(lo), int(hi)
        return reg.BandSpec.exponents(float(lo), float(hi))
    except ValueError:
        raise ValidationError(f"cannot parse band {spec_str!r} (want lo:hi)",
                              module="cli")


# ---------------------------------------------------------------- simulate

def _cmd_simulate(args):
    out = args.output
    if args.generator == "arfima":
        x = sim.sim_arfima(args.d, args.n, args.sd, args.seed)
        _atomic_write(out, lambda tmp: ser.write_csv(x, tmp))
        _write_rows(_truth_path(out), ["d", "innovation_sd", "n", "seed"],
                    [[repr(args.d), repr(args.sd), args.n, args.seed]])
    elif args.generator == "fcoint":
        x, y, truth = sim.sim_fcoint(args.beta, args.alpha, args.d, args.du,
                                     args.rho, args.n, args.usd, args.seed)
        _atomic_write(f"{out}.x.csv", lambda tmp: ser.write_csv(x, tmp))
        _atomic_write(f"{out}.y.csv", lambda tmp: ser.write_csv(y, tmp))
        _write_rows(f"{out}.truth.csv",
                    ["alpha", "beta", "d", "d_u", "rho", "u_sd", "n", "seed"],
                    [[repr(truth.alpha), repr(truth.beta), repr(truth.d),
                      repr(truth.d_u), repr(truth.rho), repr(truth.u_sd),
                      args.n, args.seed]])
    elif args.generator == "jumpdiff":
        spec = sim.JumpDiffusionSpec(mu=args.mu, sigma=args.sigma, lam=args.lam,
                                     xi_mean=args.xi_mean, xi_sd=args.xi_sd,
                                     eta=args.eta, n=args.n, seed=args.seed)
        rec = sim.sim_jump_diffusion(spec)
        prices = rec.observed.with_values(np.exp(rec.observed.values), units="price")
        _atomic_write(out, lambda tmp: ser.write_csv(prices, tmp, "timestamp", "price"))
        _write_rows(_truth_path(out),
                    ["integrated_variance", "jump_variation", "quadratic_variation",
                     "n_jumps", "sigma", "eta", "lambda", "n", "seed"],
                    [[repr(rec.integrated_variance), repr(rec.jump_variation),
                      repr(rec.quadratic_variation), len(rec.jump_sizes),
                      repr(args.sigma), repr(args.eta), repr(args.lam),
                      args.n, args.seed]])
    else:
        chain = sim.sim_bs_chain(args.forward, args.sigma, args.tau_days / 365.0,
                                 args.lo, args.hi, args.step, args.rate)
        _atomic_write(out, lambda tmp: opt.write_chain_csv(chain, tmp))
        _write_rows(_truth_path(out),
                    ["forward", "sigma", "tau_years", "period_variance"],
                    [[repr(args.forward), repr(args.sigma),
                      repr(args.tau_days / 365.0),
                      repr(args.sigma ** 2 * args.tau_days / 365.0)]])
    return 0


def _truth_path(out):
    stem, ext = os.path.splitext(out)
    return f"{stem}.truth.csv"


# ------------------------------------------------------------------- modwt

def _cmd_modwt(args):
    _require_files(args.input)
    x = ser.load_csv(args.input)
    levels = args.levels if args.levels else int(math.floor(math.log2(len(x))))
    decomp = modwt_transform(x, levels, _FILTERS[args.filter])
    _atomic_write(args.output, lambda tmp: decomp_to_csv(decomp, tmp))
    rep = energy_report(decomp)
    print(f"levels={levels} filter={args.filter} "
          f"energy_residual={rep['relative_residual']:.3e}")
    return 0


# --------------------------------------------------------------- coherence

def _cmd_coherence(args):
    _require_files(args.x, args.y)
    x = ser.load_csv(args.x)
    y = ser.load_csv(args.y)
    result = coh.wavelet_coherence(x, y, dt=args.dt, dj=args.dj)
    if args.mc > 0:
        thr = coh.mc_significance(x, y, n_surrogates=args.mc,
                                  quantile=args.quantile, seed=args.seed,
                                  dt=args.dt, dj=args.dj)
        result = coh.CoherenceResult(result.r2, result.phase, result.coi,
                                     result.scales, result.times, result.dt,
                                     threshold=thr)
    _atomic_write(f"{args.output}.csv",
                  lambda tmp: coh.coherence_to_csv(result, tmp))
    _atomic_write(f"{args.output}.svg", lambda tmp: emit_plot(result, tmp))
    return 0


# ------------------------------------------------------------------ memory

def _cmd_memory(args):
    _require_files(args.input)
    x = ser.load_csv(args.input)
    qs = [float(q) for q in args.q.split(",")]
    rows = []
    for q in qs:
        est = lm.gph(x, q, regressor=args.gph_regressor)
        rows.append([repr(q), est.m, _num(est.d_hat), _num(est.se)])
    _write_rows(args.output, ["q", "m", "d_hat", "se"], rows)
    return 0


# ----------------------------------------------------------------- regress

def _cmd_regress(args):
    _require_files(args.x, args.y)
    x = ser.load_csv(args.x)
    y = ser.load_csv(args.y)
    method = args.method
    if method == "ols":
        fit = reg.ols(y, x)
    elif method == "wbls":
        wb = _parse_band(args.wavelet_band, "wavelet")
        k, l = wb if wb else (1, args.levels)
        fit = reg.wbls(y, x, k, l, levels=args.levels,
                       filt=_FILTERS[args.filter],
                       include_scaling=args.include_scaling)
    elif method == "nbls":
        fit = reg.nbls(y, x, _parse_band(args.fourier_band, "fourier"))
    else:
        band = _parse_band(args.fourier_band, "fourier")
        if band is None:
            raise ValidationError("fmnbls needs --fourier-band lo:hi", module="cli")
        fit = reg.fmnbls(y, x, band, _parse_band(args.aux_band, "fourier"))
    band_label = fit.band.label() if fit.band else "full"
    rd = fit.residual_d
    _write_rows(args.output,
                ["method", "band", "alpha", "beta", "se_alpha", "se_beta",
                 "residual_d", "residual_d_se"],
                [[fit.method, band_label, _num(fit.alpha), _num(fit.beta),
                  _num(fit.se_alpha), _num(fit.se_beta),
                  _num(rd.d_hat if rd else None), _num(rd.se if rd else None)]])
    return 0


# ---------------------------------------------------------------------- rv

def _parse_resample(spec_str):
    if spec_str is None:
        return None
    units = {"s": 1.0, "m": 60.0, "h": 3600.0}
    try:
        return float(spec_str[:-1]) * units[spec_str[-1]]
    except (KeyError, ValueError):
        raise ValidationError(f"cannot parse resample interval {spec_str!r} "
                              "(want e.g. 5m, 30s)", module="cli")


def _split_days(ticks: ser.TimeSeries):
    ts = ticks.timestamps
    if np.issubdtype(ts.dtype, np.datetime64):
        days = ts.astype("datetime64[D]")
        labels = np.unique(days)
        for label in labels:
            mask = days == label
            if mask.sum() >= 2:
                yield str(label), ser.TimeSeries(ts[mask], ticks.values[mask],
                                                 units=ticks.units)
    else:
        yield "0", ticks


def _cmd_rv(args):
    _require_files(args.input)
    ticks = ser.load_csv(args.input)
    if np.any(ticks.values <= 0):
        raise ValidationError("non-positive tick price", module="cli")
    interval = _parse_resample(args.resample)
    rows = []
    for label, day in _split_days(ticks):
        logp = day.with_values(np.log(day.values), units="log-price")
        if args.method == "rv":
            sampled = rv_mod.resample_last_tick(logp, interval) if interval else logp
            value = rv_mod.realized_variance(np.diff(sampled.values))
            rows.append([label, _num(value), "", "", ""])
        else:
            decomp = rv_mod.jwtsrv(logp, filt=_FILTERS[args.filter],
                                   levels=args.levels, n_grids=args.grids,
                                   delta_n=args.delta_n)
            rows.append([label, _num(decomp.rv_naive), _num(decomp.jump_var),
                         _num(decomp.total), decomp.n_jumps])
    _write_rows(args.output, ["date", "rv", "jv", "jwtsrv", "n_jumps"], rows)
    return 0


# ---------------------------------------------------------------------- iv

def _cmd_iv(args):
    _require_files(args.chains)
    chains = opt.load_chain_csv(args.chains)
    rows = []
    for chain in chains:
        filtered = opt.filter_chain(chain, min_days=args.min_days,
                                    min_price=args.min_price,
                                    min_count=args.min_count)
        curve = opt.fit_vol_curve(filtered)
        if args.measure == "mfiv":
            var = opt.mfiv(curve, sd_mult=args.sd_mult)
        elif args.measure == "civ1":
            var = opt.civ(curve, opt.CIV1)
        else:
            var = opt.civ(curve, opt.CIV2)
        rows.append([chain.quote_date, repr(chain.tau * 365.0), args.measure,
                     _num(var), _num(math.sqrt(max(var, 0.0)))])
    _write_rows(args.output,
                ["quote_date", "tau_days", "measure", "implied_variance",
                 "implied_vol"], rows)
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> _Parser:
    p = _Parser(prog="specband", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="synthetic data generators")
    gsub = ps.add_subparsers(dest="generator", required=True)

    pa = gsub.add_parser("arfima")
    pa.add_argument("--d", type=float, required=True)
    pa.add_argument("--n", type=int, required=True)
    pa.add_argument("--sd", type=float, default=1.0)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("-o", "--output", required=True)

    pf = gsub.add_parser("fcoint")
    pf.add_argument("--beta", type=float, default=1.0)
    pf.add_argument("--alpha", type=float, default=0.0)
    pf.add_argument("--d", type=float, default=0.4)
    pf.add_argument("--du", type=float, default=0.0)
    pf.add_argument("--rho", type=float, default=0.0)
    pf.add_argument("--usd", type=float, default=1.0)
    pf.add_argument("--n", type=int, required=True)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("-o", "--output", required=True,
                    help="basename; writes <o>.x.csv, <o>.y.csv, <o>.truth.csv")

    pj = gsub.add_parser("jumpdiff")
    pj.add_argument("--mu", type=float, default=0.0)
    pj.add_argument("--sigma", type=float, default=0.2)
    pj.add_argument("--lambda", dest="lam", type=float, default=0.0)
    pj.add_argument("--xi-mean", type=float, default=0.0)
    pj.add_argument("--xi-sd", type=float, default=0.0)
    pj.add_argument("--eta", type=float, default=0.0)
    pj.add_argument("--n", type=int, default=23400)
    pj.add_argument("--seed", type=int, default=0)
    pj.add_argument("-o", "--output", required=True)

    pb = gsub.add_parser("bschain")
    pb.add_argument("--forward", type=float, default=100.0)
    pb.add_argument("--sigma", type=float, default=0.2)
    pb.add_argument("--tau-days", type=float, default=30.0)
    pb.add_argument("--lo", type=float, default=60.0)
    pb.add_argument("--hi", type=float, default=140.0)
    pb.add_argument("--step", type=float, default=1.0)
    pb.add_argument("--rate", type=float, default=0.0)
    pb.add_argument("-o", "--output", required=True)

    pm = sub.add_parser("modwt", help="decompose a series, export coefficients")
    pm.add_argument("--in", dest="input", required=True)
    pm.add_argument("--levels", type=int, default=0)
    pm.add_argument("--filter", choices=sorted(_FILTERS), default="d4")
    pm.add_argument("-o", "--output", required=True)

    pc = sub.add_parser("coherence", help="wavelet coherence map + SVG")
    pc.add_argument("--x", required=True)
    pc.add_argument("--y", required=True)
    pc.add_argument("--mc", type=int, default=300,
                    help="surrogate count (0 disables significance)")
    pc.add_argument("--quantile", type=float, default=0.95)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--dt", type=float, default=1.0)
    pc.add_argument("--dj", type=float, default=1.0 / 12.0)
    pc.add_argument("-o", "--output", required=True,
                    help="basename; writes <o>.csv and <o>.svg")

    pg = sub.add_parser("memory", help="GPH long-memory estimates")
    pg.add_argument("--in", dest="input", required=True)
    pg.add_argument("--q", default="0.6,0.7,0.8")
    pg.add_argument("--gph-regressor", choices=("sine", "loglambda"),
                    default="sine")
    pg.add_argument("-o", "--output", required=True)

    pr = sub.add_parser("regress", help="band spectrum regressions")
    pr.add_argument("--method", choices=("ols", "wbls", "nbls", "fmnbls"),
                    required=True)
    pr.add_argument("--x", required=True)
    pr.add_argument("--y", required=True)
    pr.add_argument("--wavelet-band", help="k:l wavelet levels")
    pr.add_argument("--fourier-band", help="a:b exponents, or 'full'")
    pr.add_argument("--aux-band", help="a:b exponents for the fmnbls auxiliary band")
    pr.add_argument("--levels", type=int, default=6)
    pr.add_argument("--filter", choices=sorted(_FILTERS), default="d4")
    pr.add_argument("--include-scaling", action="store_true")
    pr.add_argument("-o", "--output", required=True)

    pv = sub.add_parser("rv", help="daily realized variance from tick data")
    pv.add_argument("--in", dest="input", required=True)
    pv.add_argument("--method", choices=("rv", "jwtsrv"), default="rv")
    pv.add_argument("--resample", help="grid for --method rv, e.g. 5m")
    pv.add_argument("--delta-n", type=int, default=10)
    pv.add_argument("--grids", type=int, default=None)
    pv.add_argument("--levels", type=int, default=None)
    pv.add_argument("--filter", choices=sorted(_FILTERS), default="d4")
    pv.add_argument("-o", "--output", required=True)

    pi = sub.add_parser("iv", help="implied variance from option chains")
    pi.add_argument("--chains", required=True)
    pi.add_argument("--measure", choices=("mfiv", "civ1", "civ2"),
                    default="mfiv")
    pi.add_argument("--sd-mult", type=float, default=1.0)
    pi.add_argument("--min-price", type=float, default=0.375)
    pi.add_argument("--min-days", type=float, default=7.0)
    pi.add_argument("--min-count", type=int, default=6)
    pi.add_argument("-o", "--output", required=True)

    return p


_HANDLERS = {
    "simulate": _cmd_simulate,
    "modwt": _cmd_modwt,
    "coherence": _cmd_coherence,
    "memory": _cmd_memory,
    "regress": _cmd_regress,
    "rv": _cmd_rv,
    "iv": _cmd_iv,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except NumericError as exc:
        print(f"{exc.module or 'specband'}: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"{exc.module or 'specband'}: {exc}", file=sys.stderr)
        return 1
    except SpecbandError as exc:
        print(f"{exc.module or 'specband'}: {exc}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
