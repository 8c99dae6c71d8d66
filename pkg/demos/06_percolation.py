"""Bond percolation on random trees against the generating-function oracle."""

from gwising.degree_model import DegreeDistribution
from gwising.percolation import cpn_threshold, gw_extinction_oracle, offspring_law, survival_curve

p = DegreeDistribution.parse("2:0.5,3:0.5")
law = offspring_law(p)
thetas = [0.5, 0.6, 0.7, 0.8, 0.9]
curve = survival_curve("gw", p, thetas, 20, 3000, base_seed=3)
for t, s, se in zip(thetas, curve.at_depth, curve.stderr):
    exact = 1 - gw_extinction_oracle(law, t, depth=20)
    print(f"theta {t}: simulated {s:.3f} +/- {se:.3f}, exact to depth 20 {exact:.3f}")

print("no-giant-cluster bound for gws(2), alpha=0.5:", cpn_threshold(2.5, 2, 0.5))
curve = survival_curve("gws", p, [0.2, 0.5, 0.8], 15, 2000, base_seed=4, s=2)
print("gws(2) survival to depth 15:", curve.at_depth)
