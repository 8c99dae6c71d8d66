"""Random trees and how their generations grow."""

import numpy as np

from gwising._rng import make_rng, replica_rng
from gwising.degree_model import DegreeDistribution, size_biased
from gwising.tree_synth import gen_gw, gen_gws, growth_trace, sigma_rate

p = DegreeDistribution.parse("2:0.5,3:0.5")

tree = gen_gws(p, 2, 6, make_rng(1))
trace = growth_trace(tree)
print("distinguished per level:", trace.Lhat)
print("ordinary per level:     ", trace.L)
print("immigrants per level:   ", trace.Y)

sigma = sigma_rate(size_biased(p), 2)
print("sigma =", sigma)

# L_n / (a - 1)^n averages to 1 on the ordinary tree
R, depth = 2000, 8
ratios = np.array([growth_trace(gen_gw(p, depth, replica_rng(7, i))).L / 1.5 ** np.arange(depth + 1) for i in range(R)])
print("mean L_n/1.5^n:", np.round(ratios.mean(axis=0), 3))
