"""
Where simulation and closed form part ways
==========================================

The active-surface closed forms replace the random noise gain ``||g_k||^2``
by its mean ``M``. When the amplified surface noise is comparable to the
receiver noise, this overstates the low-outage tail. Substituting the mean
in the simulation recovers the closed form, isolating the cause.
"""

from risnoma import FULL_PRECISION, default_config, estimate_op, op_analytic

print(f"{'SNR':>5} {'user':>4} {'closed form':>12} {'simulated':>12} {'sim, mean':>12}")
for snr, k in ((17.5, 1), (20.0, 1), (22.5, 2), (25.0, 2), (27.5, 3), (30.0, 3)):
    cfg = default_config(snr, FULL_PRECISION, 0.0)
    a = op_analytic(cfg, k).op
    drawn = estimate_op(cfg, 1_000_000, seed=3).op_hat[k - 1]
    mean = estimate_op(cfg, 1_000_000, seed=3, mean_norm=True).op_hat[k - 1]
    print(f"{snr:5.1f} {k:4d} {a:12.4e} {drawn:12.4e} {mean:12.4e}")

# the passive surface has no such term and the two engines agree
cfg = default_config(32.0, FULL_PRECISION, 0.0).as_passive()
print(f"\npassive, 32 dB, user 1: {op_analytic(cfg, 1).op:.4e} vs {estimate_op(cfg, 1_000_000, seed=3).op_hat[0]:.4e}")
