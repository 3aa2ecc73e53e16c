"""
Monte Carlo oracle for the RF/FSO closed forms.

Trials are split into fixed-size blocks. Block ``i`` draws from its own
Philox stream keyed by ``(seed, *stream, i)``, and block results are reduced
in block order, so results depend only on the seed, the stream key and the
trial count, never on the number of workers.

RF gains are drawn directly as Gamma variates (a Frobenius norm of i.i.d.
Nakagami-m entries is exactly Gamma distributed), so no channel matrices
are generated.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalError
from .fso import average_snr_scale
from .rflink import selection_metric, snr_scale

__all__ = [
    "RngConfig",
    "SelectionStats",
    "OutageEstimate",
    "run_blocks",
    "draw",
    "sample_rf_gain",
    "sample_malaga",
    "sample_pointing",
    "sample_channel",
    "sample_fso_snr",
    "sample_metrics",
    "sample_relay_snr",
    "simulate_selection",
    "simulate_outage",
]

SCHEMES = ("philox-block",)


@dataclass(frozen=True)
class RngConfig:
    """Seed and stream-splitting scheme of a simulation."""

    seed: int = 0
    scheme: str = "philox-block"
    block_size: int = 1 << 16
    stream: tuple = ()

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"unknown stream scheme {self.scheme!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed", "seed must be a 64-bit unsigned integer")
        if self.block_size < 1:
            raise ConfigError("block_size", "must be positive")

    def generator(self, block):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=tuple(self.stream) + (block,))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, *key):
        """Independent child configuration, e.g. one per sweep point."""
        return replace(self, stream=tuple(self.stream) + tuple(key))


def _rng_config(rng):
    if isinstance(rng, RngConfig):
        return rng
    return RngConfig(seed=int(rng))


def run_blocks(fn, trials, rng=0, workers=1):
    """
    Apply ``fn(generator, n)`` to every trial block.

    Returns the list of per-block results in block order.
    """
    if trials < 1:
        raise ConfigError("trials", "must be at least 1")
    cfg = _rng_config(rng)
    nblocks = -(-trials // cfg.block_size)
    sizes = [cfg.block_size] * (nblocks - 1) + [trials - cfg.block_size * (nblocks - 1)]

    def job(i):
        return fn(cfg.generator(i), sizes[i])

    if workers <= 1:
        return [job(i) for i in range(nblocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(nblocks)))


def draw(sampler, trials, rng=0, workers=1):
    """Concatenate ``sampler(generator, n)`` draws over all blocks."""
    return np.concatenate(run_blocks(sampler, trials, rng, workers))


def sample_rf_gain(link, rng, size=None):
    """``||H||_F^2`` draws: Gamma(m N_S N, var / m)."""
    return rng.gamma(link.shape, link.scale, size)


def sample_malaga(p, rng, size=None):
    """Malaga irradiance via its Gamma-Gamma mixture decomposition."""
    w = p.weights
    if abs(w.sum() - 1.0) > 1e-6:
        raise NumericalError(f"Malaga mixture weights sum to {w.sum()!r}")
    k = rng.choice(p.ks, size=size, p=w / w.sum())
    large = rng.gamma(p.alpha, 1.0 / p.alpha, size)
    small = rng.gamma(k, p.scale_sum / p.beta)
    return large * small


def sample_pointing(p, rng, size=None):
    """Inverse-CDF draw ``a0 * U**(1/zeta^2)``."""
    return p.a0 * rng.random(size) ** (1.0 / p.zeta2)


def sample_channel(fso, rng, size=None):
    """Composite FSO gain ``h_a * h_m``."""
    return sample_malaga(fso.malaga, rng, size) * sample_pointing(fso.pointing, rng, size)


def sample_fso_snr(fso, rng, size=None):
    """Instantaneous FSO SNR ``c * h**r``."""
    return average_snr_scale(fso) * sample_channel(fso, rng, size) ** fso.detection


def sample_metrics(profiles, p_a, rng, size):
    """Per-user scheduling metrics, shape ``(size, K)``."""
    cols = []
    for prof in profiles:
        g_sr = sample_rf_gain(prof.sr, rng, size)
        g_sp = sample_rf_gain(prof.sp, rng, size)
        cols.append(selection_metric(g_sr, g_sp, prof.max_power, p_a))
    return np.column_stack(cols)


def sample_relay_snr(profiles, p_a, ostbc, rng, size):
    """Relay SNR of the selected user and the selected index (0-based)."""
    metrics = sample_metrics(profiles, p_a, rng, size)
    chosen = np.argmax(metrics, axis=1)  # first maximum: lowest index wins ties
    best = metrics[np.arange(size), chosen]
    return best / snr_scale(profiles, ostbc), chosen


@dataclass(frozen=True)
class SelectionStats:
    """How often each SU-TX was scheduled."""

    counts: tuple
    trials: int

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if sum(self.counts) != self.trials:
            raise NumericalError("selection counts do not sum to the trial count")

    @property
    def frequencies(self):
        return np.array(self.counts, dtype=float) / self.trials

    @property
    def stderr(self):
        f = self.frequencies
        return np.sqrt(f * (1.0 - f) / self.trials)


class OutageEstimate(NamedTuple):
    estimate: float
    stderr: float


def simulate_selection(profiles, p_a, trials, rng=0, workers=1):
    """Empirical selection frequencies of the max-min scheduling rule."""
    k = len(profiles)

    def block(gen, n):
        chosen = np.argmax(sample_metrics(profiles, p_a, gen, n), axis=1)
        return np.bincount(chosen, minlength=k)

    counts = np.sum(run_blocks(block, trials, rng, workers), axis=0)
    return SelectionStats(tuple(counts), trials)


def simulate_outage(s, trials, rng=0, workers=1):
    """
    Empirical end-to-end outage of scenario ``s``.

    Returns the outage frequency and its binomial standard error.
    """
    def block(gen, n):
        relay, _ = sample_relay_snr(s.profiles, s.p_a, s.ostbc, gen, n)
        dest = sample_fso_snr(s.fso, gen, n)
        return int(np.count_nonzero(np.minimum(relay, dest) <= s.gamma_th))

    hits = sum(run_blocks(block, trials, rng, workers))
    p = hits / trials
    return OutageEstimate(p, math.sqrt(p * (1.0 - p) / trials))
