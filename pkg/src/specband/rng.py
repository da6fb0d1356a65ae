"""Deterministic random-number streams.

All stochastic code in the library draws from counter-based Philox
generators keyed by ``(seed, stream)``.  A stream is fully determined by
that pair, so Monte Carlo replications can run in any order (or in
parallel) and still produce bitwise-identical results.
"""

import os

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return a Generator for the given (seed, stream) pair.

    The Philox key packs the seed in the high 64 bits and the stream id
    in the low 64 bits, so distinct pairs never collide.
    """
    key = ((int(seed) & _MASK64) << 64) | (int(stream) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def max_threads() -> int:
    """Parallelism cap from the SPECBAND_THREADS environment variable.

    Defaults to 1 (sequential).  Results never depend on this value;
    it only bounds worker counts in Monte Carlo loops.
    """
    raw = os.environ.get("SPECBAND_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
