"""Shared builders and independent reference computations for the tests."""

import itertools
import math

import numpy as np

from gwising.ising_engine import Couplings, SpinSystem
from gwising.tree_synth import RootedTree


def tree_from_children(children_per_level, stubs):
    """Tree from per-level child counts (BFS order) and stub counts of the last level."""
    parent, level, offspring = [-1], [0], []
    frontier = [0]
    for lvl, counts in enumerate(children_per_level):
        assert len(counts) == len(frontier)
        nxt = []
        for v, m in zip(frontier, counts):
            offspring.append(m)
            for _ in range(m):
                parent.append(v)
                level.append(lvl + 1)
                nxt.append(len(parent) - 1)
        frontier = nxt
    assert len(stubs) == len(frontier)
    offspring.extend(stubs)
    depth = len(children_per_level)
    return RootedTree(parent, level, np.zeros(len(parent), bool), offspring, depth, "gw")


def random_small_tree(rng, max_vertices=12):
    """Irregular tree: interior vertices may have 0..3 children, the last level 0..2 stubs."""
    while True:
        depth = int(rng.integers(0, 5))
        counts, width, total = [], 1, 1
        for _ in range(depth):
            c = rng.integers(0, 4, size=width).tolist()
            counts.append(c)
            width = sum(c)
            total += width
        if total > max_vertices or width == 0 and depth > 0:
            continue
        return tree_from_children(counts, rng.integers(0, 3, size=width).tolist())


def random_system(rng, max_vertices=12, K_max=1.0, field=False):
    tree = random_small_tree(rng, max_vertices)
    edge = rng.uniform(-K_max, K_max, tree.n_vertices)
    edge[0] = 0.0
    stub = rng.uniform(-K_max, K_max, tree.n_stubs)
    boundary = np.where(rng.random(tree.n_stubs) < 0.5, 1.0, -1.0)
    h = rng.normal(0, 0.5, tree.n_vertices) if field else None
    return SpinSystem(tree, Couplings(edge, stub, K_max), boundary, h)


def enumerate_magnetization(system):
    """Plain-Python sum over all configurations; independent of the package solvers."""
    tree = system.tree
    n = tree.n_vertices
    owner = tree.stub_owner()
    num = [0.0] * n
    z = 0.0
    for spins in itertools.product((1, -1), repeat=n):
        energy = 0.0
        for v in range(1, n):
            energy += system.couplings.edge[v] * spins[v] * spins[tree.parent[v]]
        for i, v in enumerate(owner):
            energy += system.couplings.stub[i] * spins[v] * system.boundary[i]
        for v in range(n):
            energy += system.field[v] * spins[v]
        w = math.exp(energy)
        z += w
        for v in range(n):
            num[v] += spins[v] * w
    return np.array(num) / z
