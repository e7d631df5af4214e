"""Scenario description and single-link physics.

Users are indexed ``1..K`` throughout, matching the NOMA decoding order:
user 1 gets the largest power share and user ``K`` decodes everyone else's
message before its own. All noise powers are in units of the receiver noise
``N0`` (default ``N0 = 1``), so ``rho_s`` is the transmit SNR.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "FULL_PRECISION",
    "INFEASIBLE",
    "RisMode",
    "Topology",
    "PowerAllocation",
    "HardwareProfile",
    "SicModel",
    "RisConfig",
    "LinkBudget",
    "SystemConfig",
    "lambda_q_of_bits",
    "lloyd_max_gaussian",
    "path_gain",
    "theta_j",
    "phi_j",
    "phi_star",
    "sinr",
    "db_to_linear",
    "default_config",
]

FULL_PRECISION = math.inf
"""ADC resolution sentinel for an unquantized receiver (``lambda_q = 1``)."""

INFEASIBLE = math.inf
"""Value of ``phi_j`` when ``lambda_q^2 a_j <= gamma_th_j * theta_j``."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (float(db) / 10.0)


class RisMode(str, enum.Enum):
    ACTIVE = "active"
    PASSIVE = "passive"


# ---------------------------------------------------------------------------
# quantization


def lloyd_max_gaussian(levels: int, tol: float = 1e-14, max_iter: int = 200_000):
    """Optimal (Lloyd-Max) scalar quantizer for a unit-variance Gaussian.

    Returns ``(thresholds, codebook, mse)`` where ``thresholds`` has the
    ``levels - 1`` interior decision boundaries.
    """
    if levels < 2:
        raise ValueError("need at least two levels")
    # start from the equiprobable partition
    t = ndtri(np.arange(1, levels) / levels)
    for _ in range(max_iter):
        edges = np.concatenate(([-np.inf], t, [np.inf]))
        prob = np.diff(ndtr(edges))
        pdf = np.exp(-0.5 * edges**2) / math.sqrt(2.0 * math.pi)
        c = (pdf[:-1] - pdf[1:]) / prob
        t_new = 0.5 * (c[:-1] + c[1:])
        if np.max(np.abs(t_new - t)) < tol:
            t = t_new
            break
        t = t_new
    else:
        raise ArithmeticError(f"Lloyd iteration for {levels} levels did not converge")
    edges = np.concatenate(([-np.inf], t, [np.inf]))
    prob = np.diff(ndtr(edges))
    pdf = np.exp(-0.5 * edges**2) / math.sqrt(2.0 * math.pi)
    c = (pdf[:-1] - pdf[1:]) / prob
    # centroid condition => E[X Q] = E[Q^2], so mse = 1 - E[Q^2]
    mse = 1.0 - float(np.sum(prob * c**2))
    return t, c, mse


@lru_cache(maxsize=None)
def _lloyd_lambda(bits: int) -> float:
    return 1.0 - lloyd_max_gaussian(2**bits)[2]


def lambda_q_of_bits(bits) -> float:
    """AQNM distortion factor ``lambda_q = 1 - D(b)`` of a ``b``-bit ADC.

    ``D(b)`` is the normalized MSE of the optimal quantizer for a Gaussian
    input; computed by Lloyd-Max for ``b <= 5`` and by the high-resolution
    approximation ``(pi*sqrt(3)/2) * 2**(-2b)`` above.
    """
    if bits == FULL_PRECISION:
        return 1.0
    if isinstance(bits, float) and bits.is_integer():
        bits = int(bits)
    if not isinstance(bits, (int, np.integer)) or isinstance(bits, bool):
        raise TypeError(f"ADC bits must be an integer or FULL_PRECISION, got {bits!r}")
    if bits <= 0:
        raise ValueError(f"ADC bits must be >= 1, got {bits}")
    if bits <= 5:
        return _lloyd_lambda(int(bits))
    return 1.0 - math.pi * math.sqrt(3.0) / 2.0 * 2.0 ** (-2 * int(bits))


def path_gain(d: float, alpha: float) -> float:
    """Large-scale power gain ``d**(-alpha)``."""
    if not d > 0:
        raise ValueError(f"distance must be > 0, got {d!r}")
    return float(d) ** (-float(alpha))


# ---------------------------------------------------------------------------
# scenario value objects


def _tuple(xs) -> tuple[float, ...]:
    return tuple(float(x) for x in xs)


@dataclass(frozen=True)
class Topology:
    bs_pos: tuple[float, float]
    ris_pos: tuple[float, float]
    user_pos: tuple[tuple[float, float], ...]
    alpha: float = 2.2

    def __post_init__(self):
        object.__setattr__(self, "bs_pos", _tuple(self.bs_pos))
        object.__setattr__(self, "ris_pos", _tuple(self.ris_pos))
        object.__setattr__(self, "user_pos", tuple(_tuple(u) for u in self.user_pos))
        if len(self.user_pos) < 2:
            raise ValueError("need at least two users")
        if not self.alpha > 0:
            raise ValueError("path-loss exponent must be > 0")
        if self.d_sr <= 0:
            raise ValueError("BS and RIS must not coincide")
        for k in range(1, self.n_users + 1):
            if self.d_k(k) <= 0:
                raise ValueError(f"user {k} coincides with the RIS")

    @property
    def n_users(self) -> int:
        return len(self.user_pos)

    @property
    def d_sr(self) -> float:
        return math.dist(self.bs_pos, self.ris_pos)

    def d_k(self, k: int) -> float:
        return math.dist(self.ris_pos, self.user_pos[k - 1])


@dataclass(frozen=True)
class PowerAllocation:
    a: tuple[float, ...]

    def __post_init__(self):
        a = _tuple(self.a)
        object.__setattr__(self, "a", a)
        if any(x <= 0 for x in a):
            raise ValueError("power fractions must be > 0")
        if any(a[i] < a[i + 1] for i in range(len(a) - 1)):
            raise ValueError("power fractions must be non-increasing (a_1 >= ... >= a_K)")
        if abs(math.fsum(a) - 1.0) > 1e-12:
            raise ValueError(f"power fractions must sum to 1, got {math.fsum(a)!r}")

    def tail(self, j: int) -> float:
        """``sum_{i > j} a_i`` (1-based ``j``)."""
        return math.fsum(self.a[j:])


@dataclass(frozen=True)
class HardwareProfile:
    kappa_t_bs: float = 0.0
    kappa_r: tuple[float, ...] = ()
    adc_bits: float = FULL_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "kappa_r", _tuple(self.kappa_r))
        if self.kappa_t_bs < 0 or any(k < 0 for k in self.kappa_r):
            raise ValueError("RHI severities must be >= 0")
        lambda_q_of_bits(self.adc_bits)

    @property
    def lambda_q(self) -> float:
        return lambda_q_of_bits(self.adc_bits)


@dataclass(frozen=True)
class SicModel:
    epsilon: float = 0.0
    omega_i: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.epsilon > 0 and not self.omega_i > 0:
            raise ValueError("omega_i must be > 0 under imperfect SIC")

    @property
    def perfect(self) -> bool:
        return self.epsilon == 0.0


@dataclass(frozen=True)
class RisConfig:
    mode: RisMode = RisMode.ACTIVE
    m_elements: int = 10
    beta: float = 7.0
    n_r: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", RisMode(self.mode))
        if int(self.m_elements) != self.m_elements or self.m_elements < 1:
            raise ValueError("m_elements must be a positive integer")
        object.__setattr__(self, "m_elements", int(self.m_elements))
        if self.mode is RisMode.PASSIVE:
            if self.beta != 1.0 or self.n_r != 0.0:
                raise ValueError("a passive RIS has beta = 1 and n_r = 0")
        else:
            # beta = 1 is admitted so the passive formulas can be checked as a limit
            if not self.beta >= 1.0:
                raise ValueError("an active RIS needs beta >= 1")
            if self.n_r < 0:
                raise ValueError("n_r must be >= 0")

    @classmethod
    def passive(cls, m_elements: int) -> RisConfig:
        return cls(RisMode.PASSIVE, m_elements, 1.0, 0.0)


@dataclass(frozen=True)
class LinkBudget:
    rho_s: float
    rates: tuple[float, ...]
    n0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rates", _tuple(self.rates))
        if not self.rho_s > 0:
            raise ValueError("rho_s must be > 0")
        if any(r < 0 for r in self.rates):
            raise ValueError("target rates must be >= 0")
        if not self.n0 > 0:
            raise ValueError("n0 must be > 0")

    @property
    def gamma_th(self) -> tuple[float, ...]:
        return tuple(2.0**r - 1.0 for r in self.rates)

    @classmethod
    def from_db(cls, snr_db: float, rates: Sequence[float], n0: float = 1.0) -> LinkBudget:
        return cls(db_to_linear(snr_db), rates, n0)


@dataclass(frozen=True)
class SystemConfig:
    topology: Topology
    power_alloc: PowerAllocation
    hardware: HardwareProfile
    sic: SicModel
    ris: RisConfig
    link: LinkBudget

    def __post_init__(self):
        k = self.topology.n_users
        if len(self.power_alloc.a) != k:
            raise ValueError(f"{len(self.power_alloc.a)} power fractions for {k} users")
        if len(self.hardware.kappa_r) != k:
            raise ValueError(f"{len(self.hardware.kappa_r)} receive RHI values for {k} users")
        if len(self.link.rates) != k:
            raise ValueError(f"{len(self.link.rates)} target rates for {k} users")

    @property
    def n_users(self) -> int:
        return self.topology.n_users

    @property
    def lambda_q(self) -> float:
        return self.hardware.lambda_q

    @property
    def delta1(self) -> float:
        return self.hardware.lambda_q / self.link.n0

    def d_sr_alpha(self) -> float:
        """``d_sr ** alpha``, the inverse BS-RIS path gain."""
        return self.topology.d_sr ** self.topology.alpha

    def d_k_alpha(self, k: int) -> float:
        return self.topology.d_k(k) ** self.topology.alpha

    def replace(self, **changes) -> SystemConfig:
        """Copy with top-level sections swapped out (``dataclasses.replace``)."""
        return replace(self, **changes)

    def with_snr_db(self, snr_db: float) -> SystemConfig:
        return replace(self, link=replace(self.link, rho_s=db_to_linear(snr_db)))

    def with_bits(self, bits) -> SystemConfig:
        return replace(self, hardware=replace(self.hardware, adc_bits=bits))

    def with_elements(self, m: int) -> SystemConfig:
        return replace(self, ris=replace(self.ris, m_elements=m))

    def with_epsilon(self, epsilon: float) -> SystemConfig:
        return replace(self, sic=replace(self.sic, epsilon=epsilon))

    def as_passive(self) -> SystemConfig:
        return replace(self, ris=RisConfig.passive(self.ris.m_elements))

    def as_active(self, beta: float, n_r: float = 1.0) -> SystemConfig:
        return replace(self, ris=RisConfig(RisMode.ACTIVE, self.ris.m_elements, beta, n_r))


def default_config(snr_db: float = 30.0, adc_bits=1, epsilon: float = 0.05) -> SystemConfig:
    """Three-user scenario with the published geometry and hardware settings."""
    return SystemConfig(
        topology=Topology(
            bs_pos=(0.0, 0.0),
            ris_pos=(10.0, 5.0),
            user_pos=((25.0, 10.0), (32.0, 0.0), (40.0, -15.0)),
            alpha=2.2,
        ),
        power_alloc=PowerAllocation((0.45, 0.30, 0.25)),
        hardware=HardwareProfile(kappa_t_bs=0.8, kappa_r=(0.8, 0.8, 0.8), adc_bits=adc_bits),
        sic=SicModel(epsilon=epsilon, omega_i=1.0),
        ris=RisConfig(RisMode.ACTIVE, m_elements=10, beta=7.0, n_r=1.0),
        link=LinkBudget.from_db(snr_db, (0.15, 0.15, 0.15)),
    )


# ---------------------------------------------------------------------------
# SINR bookkeeping


def _check_indices(config: SystemConfig, k: int, j: int) -> None:
    if not 1 <= j <= k <= config.n_users:
        raise IndexError(f"need 1 <= j <= k <= {config.n_users}, got k={k}, j={j}")


def theta_j(config: SystemConfig, k: int, j: int) -> float:
    """Signal-proportional distortion coefficient for user ``k`` decoding ``s_j``.

    ``lambda_q^2 (sum_{i>j} a_i - 1) + lambda_q (1 + kappa_t^2 + kappa_r,k^2)``.
    """
    _check_indices(config, k, j)
    lq = config.lambda_q
    hw = config.hardware
    return lq * lq * (config.power_alloc.tail(j) - 1.0) + lq * (
        1.0 + hw.kappa_t_bs**2 + hw.kappa_r[k - 1] ** 2
    )


def phi_j(config: SystemConfig, k: int, j: int) -> float:
    """Normalized SINR threshold ``phi_j`` for stage ``j`` at user ``k``.

    ``gamma_th_j / (beta^2 rho_s (lambda_q^2 a_j - gamma_th_j theta_j))``;
    ``beta = 1`` for a passive surface. Returns ``INFEASIBLE`` when the
    denominator is not positive.
    """
    g = config.link.gamma_th[j - 1]
    margin = config.lambda_q**2 * config.power_alloc.a[j - 1] - g * theta_j(config, k, j)
    if margin <= 0:
        return INFEASIBLE
    return g / (config.ris.beta**2 * config.link.rho_s * margin)


def phi_star(config: SystemConfig, k: int) -> float:
    """``max_j phi_j`` over the SIC stages ``j = 1..k`` of user ``k``."""
    return max(phi_j(config, k, j) for j in range(1, k + 1))


def sinr(config: SystemConfig, k: int, j: int, xi_sq, g_norm_sq, h_i_sq):
    """SINR of user ``k`` decoding ``s_j`` for given channel magnitudes.

    ``xi_sq`` is the coherently combined cascade gain ``|g_k^H Phi h_sr|^2``,
    ``g_norm_sq`` is ``||g_k^H Phi||^2`` and ``h_i_sq`` the residual-SIC
    power ``|h_I|^2``. Arrays broadcast; scalars in, scalar out.
    """
    _check_indices(config, k, j)
    xi_sq = np.asarray(xi_sq, dtype=float)
    g_norm_sq = np.asarray(g_norm_sq, dtype=float)
    h_i_sq = np.asarray(h_i_sq, dtype=float)
    if np.any(xi_sq < 0) or np.any(g_norm_sq < 0) or np.any(h_i_sq < 0):
        raise ValueError("channel magnitudes must be >= 0")

    lq = config.lambda_q
    rho = config.link.rho_s
    beta_sq = config.ris.beta**2
    n_r = config.ris.n_r
    d_sr_a = config.d_sr_alpha()
    d_k_a = config.d_k_alpha(k)
    eps = config.sic.epsilon

    signal = beta_sq * xi_sq * rho
    num = lq * lq * signal * config.power_alloc.a[j - 1]
    den = (
        signal * theta_j(config, k, j)
        + d_sr_a * beta_sq * n_r * g_norm_sq * config.delta1
        + d_sr_a * d_k_a * (lq * lq + eps * rho * h_i_sq)
    )
    out = num / den
    return float(out) if out.ndim == 0 else out
