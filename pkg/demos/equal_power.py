"""
Comparing surfaces at equal total power
=======================================

The active surface spends part of the budget on amplification and biasing,
leaving less for the base station. Here the SNR axis is the total budget
``P_T / N0`` and each surface gets the transmit power that spends it exactly.
"""

from risnoma import FULL_PRECISION, default_config, op_analytic
from risnoma.cli import PowerModel, regime_config, solve_power_fairness

pm = PowerModel(p_sw_mw=0.1, p_dc_mw=0.316, n0_mw=1.0)
print(f"{'P_T dB':>6} {'P_s act mW':>11} {'P_s pas mW':>11} {'ARIS u1':>10} {'PRIS u1':>10}")
for snr in (20.0, 25.0, 30.0, 35.0, 40.0):
    base = default_config(snr, FULL_PRECISION, 0.0)
    budget = PowerModel(pm.p_sw_mw, pm.p_dc_mw, base.link.rho_s * pm.n0_mw, pm.n0_mw)
    try:
        p_act, p_pas = solve_power_fairness(budget, base)
    except ValueError as exc:
        print(f"{snr:6.1f} {exc}")
        continue
    aris = regime_config(base, "ARIS-pSIC", base.ris, equal_power=pm)
    pris = regime_config(base, "PRIS-pSIC", base.ris, equal_power=pm)
    print(f"{snr:6.1f} {p_act:11.2f} {p_pas:11.2f} {op_analytic(aris, 1).op:10.3e} {op_analytic(pris, 1).op:10.3e}")
