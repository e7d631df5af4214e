"""
Reflecting elements and ADC resolution
======================================

How the outage of the far user responds to the number of surface elements,
and how quickly a few ADC bits recover full-precision performance.
"""

from risnoma import FULL_PRECISION, HardwareProfile, default_config, lambda_q_of_bits, op_analytic

# a 1-bit ADC with kappa = 0.8 cannot decode beyond the first user, so the
# element sweep uses ideal transceivers
ideal = HardwareProfile(0.0, (0.0, 0.0, 0.0), 1)
print("user 3 outage at 45 dB, 1-bit ADC")
print(f"{'M':>3} {'ARIS':>11} {'PRIS':>11}")
for m in range(5, 31, 5):
    cfg = default_config(45.0, 1, 0.0).replace(hardware=ideal).with_elements(m)
    print(f"{m:3d} {op_analytic(cfg, 3).op:11.3e} {op_analytic(cfg.as_passive(), 3).op:11.3e}")

# distortion factor and the resulting outage of user 1
print("\nADC bits, lambda_q, and user-1 outage (ARIS, 30 dB, perfect SIC, kappa = 0.1)")
mild = HardwareProfile(0.1, (0.1, 0.1, 0.1), 1)
base = default_config(30.0, 1, 0.0).replace(hardware=mild)
for bits in list(range(1, 9)) + [FULL_PRECISION]:
    label = "full" if bits == FULL_PRECISION else str(bits)
    print(f"{label:>4} {lambda_q_of_bits(bits):.6f} {op_analytic(base.with_bits(bits), 1).op:.4e}")
