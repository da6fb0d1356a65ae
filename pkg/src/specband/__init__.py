"""specband: wavelet band spectral estimation toolkit.

Library for studying frequency-dependent relationships between time
series: MODWT analysis with energy-exact variance/covariance
decompositions, wavelet and Fourier band least squares for fractionally
cointegrated pairs, GPH long-memory estimation, Morlet wavelet coherence
with Monte Carlo significance, jump-robust two-scale realized variance,
and model-free / corridor implied variance from option chains, all backed
by deterministic simulation oracles.
"""

from .errors import NumericError, SpecbandError, ValidationError
from .series import (ReturnSeries, TimeSeries, aggregate_interval,
                     aggregate_window_sums, demean, frac_diff, load_csv,
                     log_returns, write_csv)
from .modwt import (D4, HAAR, LA8, FilterPair, ModwtDecomp, ScaleEstimate,
                    decomp_to_csv, energy_report, make_filter, modwt,
                    scaling_covariance, scaling_variance, squared_gain,
                    wavelet_covariance, wavelet_variance)
from .longmemory import MemoryEstimate, Spectrum, gph, periodogram
from .regression import BandSpec, RegressionFit, fmnbls, nbls, ols, wbls
from .coherence import CoherenceResult, CwtField, cwt_morlet, mc_significance, wavelet_coherence
from .realized import JumpSet, RVDecomp, detect_jumps, jump_variation, jwtsrv, realized_variance
from .options import (CIV1, CIV2, CALL, PUT, CorridorSpec, OptionChain, VolCurve,
                      bs_implied_vol, bs_price, civ, filter_chain, fit_vol_curve,
                      load_chain_csv, mfiv, rnd_quantiles, write_chain_csv)
from .simulate import (FcointTruth, JumpDiffusionSpec, PathRecord, sim_arfima,
                       sim_bs_chain, sim_fcoint, sim_jump_diffusion)
from .rng import max_threads, stream_rng

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
