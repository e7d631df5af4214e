"""Outage analysis of quantized active/passive RIS-aided NOMA downlinks."""

from .analysis import (
    GammaApprox,
    OutageResult,
    Regime,
    cdf_xi,
    diversity_order,
    gamma_approx,
    op_all_users,
    op_analytic,
    op_asymptotic,
    throughput,
)
from .channel import (
    FULL_PRECISION,
    INFEASIBLE,
    HardwareProfile,
    LinkBudget,
    PowerAllocation,
    RisConfig,
    RisMode,
    SicModel,
    SystemConfig,
    Topology,
    default_config,
    lambda_q_of_bits,
    phi_j,
    phi_star,
    sinr,
    theta_j,
)
from .montecarlo import McEstimate, empirical_cdf_xi, estimate_op, estimate_op_many
from .numerics import (
    NumericalError,
    QuadratureRule,
    gauss_laguerre,
    laguerre,
    ln_gamma,
    reg_lower_inc_gamma,
    reg_upper_inc_gamma,
)

__version__ = "0.1.0"
