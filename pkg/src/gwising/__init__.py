"""Ising models on Galton-Watson type random trees: samplers, exact marginals, thresholds."""

from .degree_model import (
    DegreeDistribution,
    InvalidDistribution,
    b_alpha,
    mean_degree,
    second_moment,
    size_biased,
    validate,
    xlogx_moment,
)
from .ising_engine import Boundary, SpinSystem, assign_couplings, bp_marginals, brute_marginals
from .percolation import cpn_threshold, gw_extinction_oracle, survival_curve
from .thresholds import K_c, K_hat_c, K_of_c, lyons_Tc, network_Tc, q_of_K, threshold_sheet
from .tree_synth import RootedTree, VertexCapExceeded, gen_config, gen_gw, gen_gws, generate, growth_trace

__version__ = "0.1.0"
