"""Boundary influence on the root dies out below the critical coupling."""

from gwising.harness import make_config, run
from gwising.thresholds import K_c, K_hat_c, q_of_K

print("K_c(2.5) =", round(K_c(2.5), 5), " K_hat_c(2, 0.5) =", round(K_hat_c(2, 0.5), 5))

cfg = make_config("gap", dist="2:0.5,3:0.5", depths="4..9", K=0.1, replicas=300, seed=1)
art = run(cfg)
for d, g in zip(art.summary["depths"], art.summary["mean_root_gap"]):
    print(f"depth {d}: mean root gap {g:.3e}")
print("fitted rate", round(art.summary["fit"]["rate"], 4), "budget", round(q_of_K(0.1) * 1.5, 4))
print("budget violations:", art.violations)

# with the distinguished subtree
art = run(make_config("gap", model="gws", s=2, alpha=0.5, dist="2:0.5,3:0.5", depths="4..9", K=0.05, replicas=300, seed=1))
print("gws(2) fitted rate", round(art.summary["fit"]["rate"], 4), "regime", art.summary["theorem_regime"])
