"""
Outage probability versus transmit SNR
======================================

Closed-form outage of the three users for an active and a passive surface,
with a Monte Carlo spot check at a few SNRs. Full-precision ADCs.
"""

import numpy as np

from risnoma import FULL_PRECISION, default_config, estimate_op_many, op_analytic, op_asymptotic

snrs = np.arange(0.0, 62.5, 5.0)

# perfect SIC: the passive surface needs well over 10 dB more transmit power
print("perfect SIC")
print(f"{'SNR':>5} " + " ".join(f"{s + str(k):>11}" for s in ("ARIS u", "PRIS u") for k in (1, 2, 3)))
for snr in snrs:
    cfg = default_config(snr, FULL_PRECISION, 0.0)
    ops = [op_analytic(cfg, k).op for k in (1, 2, 3)] + [op_analytic(cfg.as_passive(), k).op for k in (1, 2, 3)]
    print(f"{snr:5.1f} " + " ".join(f"{p:11.3e}" for p in ops))

# imperfect SIC flattens every curve onto an SNR-independent floor
print("\nimperfect SIC (epsilon = 0.05) and its floor")
for snr in snrs[::2]:
    cfg = default_config(snr, FULL_PRECISION, 0.05)
    print(f"{snr:5.1f} " + " ".join(f"{op_analytic(cfg, k).op:9.4f}" for k in (1, 2, 3)))
floor = default_config(60.0, FULL_PRECISION, 0.05)
print("floor " + " ".join(f"{op_asymptotic(floor, k).op:9.4f}" for k in (1, 2, 3)))

# simulation with the same draws for both surfaces
print("\nMonte Carlo (10^6 trials) vs closed form, passive surface, perfect SIC")
cfgs = [default_config(snr, FULL_PRECISION, 0.0).as_passive() for snr in (30.0, 35.0, 40.0)]
for cfg, est in zip(cfgs, estimate_op_many(cfgs, 1_000_000, seed=1)):
    snr = 10 * np.log10(cfg.link.rho_s)
    pairs = [f"{op_analytic(cfg, k).op:.3e}/{est.op_hat[k - 1]:.3e}" for k in (1, 2, 3)]
    print(f"{snr:5.1f} " + "  ".join(pairs))
