"""Locating the transition on regular trees from finite depths."""

from gwising.harness import regular_root_gap, run_lyons_scan
from gwising.thresholds import lyons_K_crit, lyons_Tc, network_Tc

for rho in (2.0, 1.6):
    scan = run_lyons_scan(rho)
    print(f"branching {rho}: estimate {scan.K_crit_estimate:.4f}, exact {scan.K_crit_exact:.4f}")

# below, at and above the transition the gap behaves very differently with depth
K = lyons_K_crit(2.0)
for factor in (0.9, 1.0, 1.1):
    print(factor, [f"{regular_root_gap(factor * K, 2.0, n):.2e}" for n in (10, 30, 100)])

# the uncorrelated-network formula is the same number
print(lyons_Tc(1.0, 1.6), network_Tc(1.0, 2.5, 6.5))
