"""Monte Carlo simulation of the quantized RIS-NOMA downlink.

Every trial draws fresh BS-RIS and RIS-user Rayleigh coefficients, aligns the
RIS phases to the evaluated user's cascade, and checks each SIC stage's SINR
against its threshold. Unlike the closed forms, the ARIS noise term uses the
drawn ``||g_k||^2`` rather than its mean.

Trials are split into fixed-size chunks, each with its own RNG substream keyed
by ``(seed, chunk index)``, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import SystemConfig, sinr

__all__ = [
    "CHUNK_SIZE",
    "ChannelDraw",
    "McEstimate",
    "chunk_rng",
    "draw",
    "estimate_op",
    "estimate_op_many",
    "empirical_cdf_xi",
    "sample_xi",
]

CHUNK_SIZE = 1 << 16


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent generator for one chunk of trials."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _cn_magnitude(rng: np.random.Generator, shape) -> np.ndarray:
    # |CN(0, 1)|: real and imaginary parts each N(0, 1/2)
    z = rng.standard_normal(shape + (2,))
    z *= math.sqrt(0.5)
    return np.hypot(z[..., 0], z[..., 1])


@dataclass(frozen=True)
class ChannelDraw:
    """Small-scale fading for ``n`` trials.

    ``h_mag`` is ``(n, M)``, ``g_mag`` is ``(K, n, M)``; ``g_norm_sq``,
    ``h_i_sq`` and ``xi`` are ``(K, n)``.
    """

    h_mag: np.ndarray
    g_mag: np.ndarray
    g_norm_sq: np.ndarray
    h_i_sq: np.ndarray

    @property
    def xi(self) -> np.ndarray:
        """Phase-aligned cascade amplitude ``sum_m |g_km| |h_m|`` per user."""
        return np.einsum("knm,nm->kn", self.g_mag, self.h_mag)


def _raw_draw(rng: np.random.Generator, n: int, m: int, k: int, omega_i: float = 1.0) -> ChannelDraw:
    h_mag = _cn_magnitude(rng, (n, m))
    g_mag = _cn_magnitude(rng, (k, n, m))
    g_norm_sq = np.sum(g_mag * g_mag, axis=2)
    h_i_sq = omega_i * rng.standard_exponential((k, n))
    return ChannelDraw(h_mag, g_mag, g_norm_sq, h_i_sq)


def draw(config: SystemConfig, rng: np.random.Generator, trials: int = 1) -> ChannelDraw:
    """Draw ``trials`` independent channel realizations for ``config``."""
    return _raw_draw(rng, trials, config.ris.m_elements, config.n_users, config.sic.omega_i)


@dataclass(frozen=True)
class McEstimate:
    op_hat: tuple[float, ...]
    trials: int
    std_err: tuple[float, ...]
    seed: int
    outages: tuple[int, ...] = ()

    def throughput(self, rates: Sequence[float]) -> tuple[float, ...]:
        return tuple((1.0 - p) * r for p, r in zip(self.op_hat, rates))


def _outage_counts(configs: Sequence[SystemConfig], d: ChannelDraw, mean_norm: bool = False) -> np.ndarray:
    # h_i_sq was drawn with unit variance; each config scales it by its own omega_i
    xi_sq = d.xi**2
    g_norm_sq = np.full_like(d.g_norm_sq, configs[0].ris.m_elements) if mean_norm else d.g_norm_sq
    counts = np.zeros((len(configs), configs[0].n_users), dtype=np.int64)
    for c, cfg in enumerate(configs):
        gth = cfg.link.gamma_th
        for k in range(1, cfg.n_users + 1):
            h_i = cfg.sic.omega_i * d.h_i_sq[k - 1]
            ok = np.ones(xi_sq.shape[1], dtype=bool)
            for j in range(1, k + 1):
                ok &= sinr(cfg, k, j, xi_sq[k - 1], g_norm_sq[k - 1], h_i) > gth[j - 1]
            counts[c, k - 1] = ok.size - np.count_nonzero(ok)
    return counts


def _check_shared_shape(configs: Sequence[SystemConfig]) -> None:
    if not configs:
        raise ValueError("need at least one config")
    m, k = configs[0].ris.m_elements, configs[0].n_users
    for cfg in configs:
        if cfg.ris.m_elements != m or cfg.n_users != k:
            raise ValueError("configs sharing draws must agree on M and K")


def _chunks(trials: int):
    n_chunks = -(-trials // CHUNK_SIZE)
    for i in range(n_chunks):
        yield i, min(CHUNK_SIZE, trials - i * CHUNK_SIZE)


def estimate_op_many(
    configs: Sequence[SystemConfig], trials: int, seed: int = 0, workers: int = 1, mean_norm: bool = False
) -> list[McEstimate]:
    """Empirical outage for several configs evaluated on the same draws.

    All configs must share ``M`` and ``K``; everything else (SNR, surface
    type, hardware, SIC model, geometry) may differ. Reusing draws keeps
    regime comparisons paired and saves regenerating the fading.

    ``mean_norm=True`` is a diagnostic: it substitutes ``M`` for the drawn
    ``||g_k||^2`` in the ARIS noise term, as the closed forms do.
    """
    configs = list(configs)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    _check_shared_shape(configs)
    m, k = configs[0].ris.m_elements, configs[0].n_users

    def run(chunk):
        idx, n = chunk
        d = _raw_draw(chunk_rng(seed, idx), n, m, k)
        return _outage_counts(configs, d, mean_norm)

    if workers == 1:
        parts = map(run, _chunks(trials))
        total = sum(parts, np.zeros((len(configs), k), dtype=np.int64))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            total = sum(pool.map(run, _chunks(trials)), np.zeros((len(configs), k), dtype=np.int64))

    out = []
    for row in total:
        p = row / trials
        se = np.sqrt(p * (1.0 - p) / trials)
        out.append(
            McEstimate(
                op_hat=tuple(float(x) for x in p),
                trials=trials,
                std_err=tuple(float(x) for x in se),
                seed=seed,
                outages=tuple(int(x) for x in row),
            )
        )
    return out


def estimate_op(
    config: SystemConfig, trials: int, seed: int = 0, workers: int = 1, mean_norm: bool = False
) -> McEstimate:
    """Empirical outage probability of every user for one config."""
    return estimate_op_many([config], trials, seed, workers, mean_norm)[0]


def sample_xi(m: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """``trials`` draws of the phase-aligned amplitude ``sum_m |g_m||h_m|``."""
    return np.sum(_cn_magnitude(rng, (trials, m)) * _cn_magnitude(rng, (trials, m)), axis=1)


def empirical_cdf_xi(m: int, trials: int, seed: int, grid: Sequence[float], workers: int = 1) -> list[float]:
    """Fraction of draws with ``xi_M <= x`` at each point of a sorted grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted ascending")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def run(chunk):
        idx, n = chunk
        xi = sample_xi(m, n, chunk_rng(seed, idx))
        # position of the first grid point >= xi; xi <= grid[i] iff pos <= i
        pos = np.searchsorted(grid, xi, side="left")
        return np.bincount(pos, minlength=grid.size + 1)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        hist = sum(pool.map(run, _chunks(trials)), np.zeros(grid.size + 1, dtype=np.int64))
    return [float(c) / trials for c in np.cumsum(hist)[:-1]]
