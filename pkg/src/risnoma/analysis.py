"""Closed-form outage, asymptotes, diversity order and throughput.

The cascaded amplitude ``xi_M = sum_m |g_m||h_m|`` is replaced by a Gamma
law with shape ``mu0 + 1`` and scale ``phi0`` (moment matched). Under
imperfect SIC the residual-interference power is integrated out with a
Gauss-Laguerre rule; the ARIS thermal-noise term uses ``M`` in place of
``||g_k^H Phi||^2`` (its mean).

The Gauss-Laguerre sum is accurate while the integrand varies on the scale of
the weight ``exp(-z)``. When ``rho_s * epsilon * Omega_I`` is large and the
outage is close to 1, success is confined to ``z`` far below the first node
and the sum underestimates ``1 - op`` badly; raise the order or integrate
adaptively if that tail matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .channel import INFEASIBLE, RisMode, SystemConfig, db_to_linear, phi_star
from .numerics import QuadratureRule, gauss_laguerre, ln_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma

__all__ = [
    "DEFAULT_ORDER",
    "GammaApprox",
    "Regime",
    "OutageResult",
    "gamma_approx",
    "cdf_xi",
    "op_analytic",
    "op_asymptotic",
    "op_all_users",
    "diversity_order",
    "throughput",
]

DEFAULT_ORDER = 64

_PI2 = math.pi**2


@dataclass(frozen=True)
class GammaApprox:
    mu0: float
    phi0: float

    @property
    def shape(self) -> float:
        return self.mu0 + 1.0


def gamma_approx(m: int) -> GammaApprox:
    """Gamma parameters for the CDF of ``xi_M`` with ``M`` elements."""
    if int(m) != m or m < 1:
        raise ValueError(f"M must be a positive integer, got {m!r}")
    mu0 = ((m + 1) * _PI2 - 16.0) / (16.0 - _PI2)
    phi0 = (16.0 - _PI2) / (4.0 * math.pi)
    return GammaApprox(mu0, phi0)


def cdf_xi(x: float, m: int) -> float:
    """Approximate ``Pr(xi_M <= x)``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    g = gamma_approx(m)
    return reg_lower_inc_gamma(g.shape, x / g.phi0)


@dataclass(frozen=True)
class Regime:
    system: str  # "ARIS" | "PRIS"
    sic: str  # "ipSIC" | "pSIC"
    kind: str = "analytic"  # "analytic" | "asymptotic"

    def __str__(self) -> str:
        return f"{self.system}-{self.sic}"

    @classmethod
    def of(cls, config: SystemConfig, kind: str = "analytic") -> Regime:
        system = "ARIS" if config.ris.mode is RisMode.ACTIVE else "PRIS"
        sic = "pSIC" if config.sic.perfect else "ipSIC"
        return cls(system, sic, kind)


@dataclass(frozen=True)
class OutageResult:
    """Outage of one user. ``success`` is ``1 - op`` evaluated directly, so
    it keeps full relative precision when ``op`` rounds to 1."""

    user: int
    op: float
    feasible: bool
    regime: Regime
    success: float


# ---------------------------------------------------------------------------
# formula transcriptions
#
# Each returns the incomplete-gamma arguments ``x_p`` such that the outage is
# ``sum_p w_p P(mu0 + 1, x_p)`` (one argument with weight 1 under pSIC).


def _aris_ipsic_args(phi0, phi, d_sr_a, d_k_a, beta, m, n_r, delta1, lq, rho, eps, omega, nodes):
    noise = beta**2 * m * n_r * delta1
    return [math.sqrt(phi * d_sr_a * (noise + d_k_a * (lq * lq + rho * eps * omega * z))) / phi0 for z in nodes]


def _aris_psic_arg(phi0, phi, d_sr_a, d_k_a, beta, m, n_r, delta1, lq):
    noise = beta**2 * m * n_r * delta1
    return math.sqrt(phi * d_sr_a * (noise + d_k_a * lq * lq)) / phi0


def _pris_ipsic_args(phi0, phi, d_sr_a, d_k_a, lq, rho, eps, omega, nodes):
    return [math.sqrt(phi * d_sr_a * d_k_a * (lq * lq + rho * eps * omega * z)) / phi0 for z in nodes]


def _pris_psic_arg(phi0, phi, d_sr_a, d_k_a, lq):
    return math.sqrt(phi * d_sr_a * d_k_a * lq * lq) / phi0


def _floor_ipsic_args(phi0, phi, d_sr_a, d_k_a, rho, eps, omega, nodes):
    # high-SNR ipSIC limit, identical in form for both surfaces
    return [math.sqrt(phi * d_sr_a * d_k_a * eps * rho * omega * z) / phi0 for z in nodes]


def _power_law_psic(s, phi0, phi, d_sr_a, noise_term):
    # leading term of P(s, x) ~ x^s / Gamma(s + 1) for small x
    if phi == 0.0:
        return 0.0
    log_op = 0.5 * s * math.log(phi * d_sr_a * noise_term) - ln_gamma(s + 1.0) - s * math.log(phi0)
    return math.exp(min(log_op, 0.0))


def _mix(s, weights, args):
    """``(sum w P(s, x), sum w Q(s, x))``; the second is accurate near op = 1."""
    op = math.fsum(w * reg_lower_inc_gamma(s, x) for w, x in zip(weights, args))
    success = math.fsum(w * reg_upper_inc_gamma(s, x) for w, x in zip(weights, args))
    return min(max(op, 0.0), 1.0), min(max(success, 0.0), 1.0)


# ---------------------------------------------------------------------------


def _resolve(config: SystemConfig, k: int, rule: QuadratureRule | None):
    if not 1 <= k <= config.n_users:
        raise IndexError(f"user index {k} outside 1..{config.n_users}")
    g = gamma_approx(config.ris.m_elements)
    return g, phi_star(config, k), rule or gauss_laguerre(DEFAULT_ORDER)


def op_analytic(config: SystemConfig, k: int, rule: QuadratureRule | None = None) -> OutageResult:
    """Approximate outage probability of user ``k`` (1-based).

    Dispatches on the surface type and on ``epsilon``: a Gauss-Laguerre sum
    under imperfect SIC, a single regularized incomplete gamma under perfect
    SIC. An infeasible SIC stage gives ``op = 1``.
    """
    g, phi, rule = _resolve(config, k, rule)
    regime = Regime.of(config)
    if phi == INFEASIBLE:
        return OutageResult(k, 1.0, False, regime, 0.0)

    phi0 = g.phi0
    lq = config.lambda_q
    rho = config.link.rho_s
    eps, omega = config.sic.epsilon, config.sic.omega_i
    d_sr_a, d_k_a = config.d_sr_alpha(), config.d_k_alpha(k)
    ris = config.ris

    if ris.mode is RisMode.ACTIVE:
        if eps > 0:
            weights = rule.weights
            args = _aris_ipsic_args(
                phi0, phi, d_sr_a, d_k_a, ris.beta, ris.m_elements, ris.n_r, config.delta1, lq, rho, eps, omega,
                rule.nodes,
            )
        else:
            weights = (1.0,)
            args = [_aris_psic_arg(phi0, phi, d_sr_a, d_k_a, ris.beta, ris.m_elements, ris.n_r, config.delta1, lq)]
    else:
        if eps > 0:
            weights = rule.weights
            args = _pris_ipsic_args(phi0, phi, d_sr_a, d_k_a, lq, rho, eps, omega, rule.nodes)
        else:
            weights = (1.0,)
            args = [_pris_psic_arg(phi0, phi, d_sr_a, d_k_a, lq)]
    op, success = _mix(g.shape, weights, args)
    return OutageResult(k, op, True, regime, success)


def op_asymptotic(config: SystemConfig, k: int, rule: QuadratureRule | None = None) -> OutageResult:
    """High-SNR outage of user ``k``.

    Imperfect SIC: the error floor, which no longer depends on ``rho_s``.
    Perfect SIC: the power-law tail ``∝ rho_s^{-(mu0+1)/2}``, capped at 1.
    """
    g, phi, rule = _resolve(config, k, rule)
    regime = Regime.of(config, "asymptotic")
    if phi == INFEASIBLE:
        return OutageResult(k, 1.0, False, regime, 0.0)

    s, phi0 = g.shape, g.phi0
    lq = config.lambda_q
    d_sr_a, d_k_a = config.d_sr_alpha(), config.d_k_alpha(k)
    ris = config.ris

    if config.sic.epsilon > 0:
        args = _floor_ipsic_args(
            phi0, phi, d_sr_a, d_k_a, config.link.rho_s, config.sic.epsilon, config.sic.omega_i, rule.nodes
        )
        op, success = _mix(s, rule.weights, args)
        return OutageResult(k, op, True, regime, success)
    if ris.mode is RisMode.ACTIVE:
        noise = ris.beta**2 * ris.m_elements * ris.n_r * config.delta1 + d_k_a * lq * lq
    else:
        noise = d_k_a * lq * lq
    op = _power_law_psic(s, phi0, phi, d_sr_a, noise)
    return OutageResult(k, op, True, regime, 1.0 - op)


def op_all_users(config: SystemConfig, rule: QuadratureRule | None = None, asymptotic: bool = False):
    fn = op_asymptotic if asymptotic else op_analytic
    return [fn(config, k, rule) for k in range(1, config.n_users + 1)]


def diversity_order(op_fn: Callable[[float], float], snr_lo: float = 60.0, snr_hi: float = 80.0) -> float:
    """Log-log slope ``-d log(op) / d log(rho)`` between two SNRs given in dB."""
    if not snr_hi > snr_lo:
        raise ValueError("snr_hi must exceed snr_lo")
    p_lo, p_hi = op_fn(snr_lo), op_fn(snr_hi)
    if not (p_lo > 0 and p_hi > 0):
        raise ValueError(f"outage must be positive at both SNRs (got {p_lo!r}, {p_hi!r})")
    return -(math.log(p_hi) - math.log(p_lo)) / (math.log(db_to_linear(snr_hi)) - math.log(db_to_linear(snr_lo)))


def throughput(op: float, rate: float) -> float:
    """Delay-limited throughput ``(1 - op) * rate`` in BPCU."""
    if not 0.0 <= op <= 1.0:
        raise ValueError(f"op must lie in [0, 1], got {op!r}")
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate!r}")
    return (1.0 - op) * rate
