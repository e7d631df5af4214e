import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gammainc, gammaincc
from scipy.stats import gamma as gamma_dist

from risnoma.analysis import (
    Regime,
    cdf_xi,
    diversity_order,
    gamma_approx,
    op_all_users,
    op_analytic,
    op_asymptotic,
    throughput,
)
from risnoma.channel import FULL_PRECISION, HardwareProfile, default_config, phi_star
from risnoma.numerics import gauss_laguerre


def full(snr_db=30.0, eps=0.0):
    return default_config(snr_db, FULL_PRECISION, eps)


# ---------------------------------------------------------------- Gamma approximation


def test_gamma_parameters():
    assert gamma_approx(1).mu0 == pytest.approx(0.60994576, rel=1e-8)
    assert gamma_approx(10).mu0 == pytest.approx(15.0994576, rel=1e-8)
    assert gamma_approx(10).phi0 == pytest.approx((16 - math.pi**2) / (4 * math.pi), rel=1e-15)
    assert gamma_approx(7).shape == gamma_approx(7).mu0 + 1


@pytest.mark.parametrize("m", [1, 4, 10, 50])
def test_gamma_matches_cascade_moments(m):
    # |g||h| with unit Rayleigh factors has mean pi/4 and variance 1 - pi^2/16
    g = gamma_approx(m)
    mean = g.shape * g.phi0
    var = g.shape * g.phi0**2
    assert mean == pytest.approx(m * math.pi / 4, rel=1e-12)
    assert var == pytest.approx(m * (1 - math.pi**2 / 16), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 64), st.floats(0.0, 100.0))
def test_cdf_xi_matches_scipy_gamma(m, x):
    g = gamma_approx(m)
    assert cdf_xi(x, m) == pytest.approx(gamma_dist.cdf(x, g.shape, scale=g.phi0), abs=1e-12)


def test_cdf_xi_domain():
    assert cdf_xi(0.0, 10) == 0.0
    with pytest.raises(ValueError):
        cdf_xi(-1.0, 10)
    with pytest.raises(ValueError):
        gamma_approx(0)
    with pytest.raises(ValueError):
        gamma_approx(2.5)


# ---------------------------------------------------------------- closed forms


def _psic_oracle(cfg, k):
    # one-shot transcription of the perfect-SIC outage with scipy's gammainc
    g = gamma_approx(cfg.ris.m_elements)
    phi = phi_star(cfg, k)
    noise = cfg.d_k_alpha(k) * cfg.lambda_q**2
    if cfg.ris.mode.value == "active":
        noise += cfg.ris.beta**2 * cfg.ris.m_elements * cfg.ris.n_r * cfg.lambda_q / cfg.link.n0
    return gammainc(g.shape, math.sqrt(phi * cfg.d_sr_alpha() * noise) / g.phi0)


def _ipsic_oracle(cfg, k):
    # adaptive integration over the residual-interference power z ~ Exp(1)
    g = gamma_approx(cfg.ris.m_elements)
    phi = phi_star(cfg, k)
    lam = cfg.lambda_q
    rho_eps = cfg.link.rho_s * cfg.sic.epsilon * cfg.sic.omega_i
    aris = cfg.ris.beta**2 * cfg.ris.m_elements * cfg.ris.n_r * lam / cfg.link.n0

    def f(z):
        x = math.sqrt(phi * cfg.d_sr_alpha() * (aris + cfg.d_k_alpha(k) * (lam**2 + rho_eps * z))) / g.phi0
        return math.exp(-z) * gammainc(g.shape, x)

    return quad(f, 0, math.inf, epsabs=1e-13, epsrel=1e-11, limit=400)[0]


@pytest.mark.parametrize("passive", [False, True])
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("snr_db", [10.0, 30.0, 50.0])
def test_psic_matches_transcription(passive, k, snr_db):
    cfg = full(snr_db)
    if passive:
        cfg = cfg.as_passive()
    assert op_analytic(cfg, k).op == pytest.approx(_psic_oracle(cfg, k), rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("passive", [False, True])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_ipsic_matches_adaptive_integral_in_smooth_regime(passive, k):
    # small epsilon * rho keeps the integrand smooth on the scale of exp(-z)
    cfg = full(20.0, eps=0.001)
    if passive:
        cfg = cfg.as_passive()
    expected = _ipsic_oracle(cfg, k)
    assert op_analytic(cfg, k, gauss_laguerre(64)).op == pytest.approx(expected, rel=1e-6)


def test_ipsic_quadrature_order_convergence_in_smooth_regime():
    cfg = full(30.0, eps=0.05)
    a64 = op_analytic(cfg, 1, gauss_laguerre(64)).op
    a128 = op_analytic(cfg, 1, gauss_laguerre(128)).op
    assert a64 == pytest.approx(a128, rel=1e-6)


def test_ipsic_quadrature_underresolves_sharp_success_region():
    # passive surface at 30 dB, 1-bit: success only for tiny residual power;
    # Gauss-Laguerre approaches the adaptive value slowly as the order grows
    cfg = default_config(30.0, 1, 0.05).as_passive()
    g = gamma_approx(10)
    phi = phi_star(cfg, 1)
    scale = phi * cfg.d_sr_alpha() * cfg.d_k_alpha(1)
    rho_eps = cfg.link.rho_s * 0.05

    def f(z):
        return math.exp(-z) * gammaincc(g.shape, math.sqrt(scale * (cfg.lambda_q**2 + rho_eps * z)) / g.phi0)

    ref = quad(f, 0, 1, epsabs=0, epsrel=1e-10, limit=400)[0] + quad(f, 1, math.inf, limit=400)[0]
    errs = [abs(op_analytic(cfg, 1, gauss_laguerre(p)).success - ref) for p in (16, 64, 256)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] > 0.5 * ref


def test_success_is_direct_complement():
    cfg = full(30.0, eps=0.05).as_passive()
    for k in (1, 2, 3):
        r = op_analytic(cfg, k)
        assert r.op + r.success == pytest.approx(1.0, abs=1e-12)


def test_infeasible_user_is_certain_outage():
    cfg = default_config()  # 1-bit, kappa = 0.8
    r = op_analytic(cfg, 3)
    assert (r.op, r.success, r.feasible) == (1.0, 0.0, False)
    assert op_asymptotic(cfg, 3).op == 1.0
    assert op_analytic(cfg, 1).feasible


def test_regime_labels():
    assert str(op_analytic(full(), 1).regime) == "ARIS-pSIC"
    assert str(op_analytic(full(eps=0.05).as_passive(), 1).regime) == "PRIS-ipSIC"
    assert op_asymptotic(full(), 1).regime == Regime("ARIS", "pSIC", "asymptotic")


def test_user_index_checked():
    with pytest.raises(IndexError):
        op_analytic(full(), 0)
    with pytest.raises(IndexError):
        op_asymptotic(full(), 4)


@settings(max_examples=50, deadline=None)
@given(
    snr_db=st.floats(0.0, 60.0),
    m=st.integers(1, 40),
    eps=st.sampled_from([0.0, 0.01, 0.05]),
    bits=st.sampled_from([1, 2, 3, FULL_PRECISION]),
    k=st.integers(1, 3),
)
def test_unit_beta_active_reduces_to_passive(snr_db, m, eps, bits, k):
    cfg = default_config(snr_db, bits, eps).with_elements(m)
    act = op_analytic(cfg.as_active(1.0, 0.0), k).op
    pas = op_analytic(cfg.as_passive(), k).op
    assert act == pytest.approx(pas, rel=1e-12, abs=0.0)


@pytest.mark.parametrize("passive", [False, True])
@pytest.mark.parametrize("eps", [0.0, 0.05])
def test_op_decreases_with_snr(passive, eps):
    for k in (1, 2, 3):
        ops = []
        for snr in np.arange(0.0, 55.0, 5.0):
            cfg = full(snr, eps)
            ops.append(op_analytic(cfg.as_passive() if passive else cfg, k).op)
        assert all(b <= a for a, b in zip(ops, ops[1:]))


def test_op_non_increasing_in_bits():
    for k in (1, 2, 3):
        base = default_config(30.0, 1, 0.0).replace(hardware=HardwareProfile(0.1, (0.1, 0.1, 0.1), 1))
        ops = [op_analytic(base.with_bits(b), k).op for b in range(1, 9)]
        assert all(b <= a + 1e-15 for a, b in zip(ops, ops[1:]))


def test_op_all_users():
    rs = op_all_users(full())
    assert [r.user for r in rs] == [1, 2, 3]
    assert [r.op for r in op_all_users(full(), asymptotic=True)] == [op_asymptotic(full(), k).op for k in (1, 2, 3)]


# ---------------------------------------------------------------- asymptotes


@pytest.mark.parametrize("passive", [False, True])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_floor_matches_analytic_at_high_snr(passive, k):
    cfg = full(80.0, eps=0.05)
    if passive:
        cfg = cfg.as_passive()
    assert op_asymptotic(cfg, k).op == pytest.approx(op_analytic(cfg, k).op, rel=1e-3)


@pytest.mark.parametrize("passive", [False, True])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_power_law_matches_analytic_at_high_snr(passive, k):
    cfg = full(80.0)
    if passive:
        cfg = cfg.as_passive()
    assert op_asymptotic(cfg, k).op == pytest.approx(op_analytic(cfg, k).op, rel=1e-3)


def test_power_law_is_capped_at_one():
    cfg = full(-30.0).as_passive()
    assert op_asymptotic(cfg, 3).op == 1.0


def test_floor_is_snr_independent():
    a = op_asymptotic(full(60.0, 0.05), 1).op
    b = op_asymptotic(full(80.0, 0.05), 1).op
    assert a == pytest.approx(b, rel=1e-12)


# ---------------------------------------------------------------- diversity order and throughput


@pytest.mark.parametrize("m", [4, 10, 30])
def test_diversity_order_of_power_law(m):
    s = gamma_approx(m).shape
    slope = diversity_order(lambda snr: op_asymptotic(full(snr).with_elements(m), 2).op)
    assert slope == pytest.approx(s / 2, abs=1e-6)


def test_diversity_order_of_floor_is_zero():
    slope = diversity_order(lambda snr: op_asymptotic(full(snr, 0.05), 2).op)
    assert abs(slope) <= 1e-9


def test_diversity_order_errors():
    with pytest.raises(ValueError):
        diversity_order(lambda snr: 0.0)
    with pytest.raises(ValueError):
        diversity_order(lambda snr: 0.1, 80.0, 60.0)


def test_throughput():
    assert throughput(0.25, 0.15) == pytest.approx(0.1125)
    assert throughput(1.0, 0.15) == 0.0
    with pytest.raises(ValueError):
        throughput(1.5, 0.15)
    with pytest.raises(ValueError):
        throughput(0.5, -1.0)
