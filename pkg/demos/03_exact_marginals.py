"""Exact magnetizations on a tree with fixed boundary spins."""

import numpy as np

from gwising._rng import make_rng
from gwising.degree_model import DegreeDistribution
from gwising.ising_engine import Boundary, SpinSystem, assign_couplings, bp_marginals, brute_marginals
from gwising.tree_synth import gen_gw

p = DegreeDistribution.parse("2:0.5,3:0.5")
tree = gen_gw(p, 2, make_rng(4))
couplings = assign_couplings(tree, "iid-uniform", J=1.0, beta=0.8, rng=make_rng(5))
system = SpinSystem(tree, couplings, Boundary.plus())
print(tree.n_vertices, "vertices,", tree.n_stubs, "boundary spins")

bp = bp_marginals(system).M
print("message passing:", np.round(bp, 6))
if tree.n_vertices <= 20:
    brute = brute_marginals(system).M
    print("enumeration:    ", np.round(brute, 6))
    print("max difference:", np.abs(bp - brute).max())

# message passing is linear in the tree size
big = gen_gw(p, 20, make_rng(6))
m = bp_marginals(SpinSystem(big, assign_couplings(big, "constant", 1.0, 0.1), Boundary.plus())).M
print(f"{big.n_vertices} vertices, root magnetization {m[0]:.3e}")
