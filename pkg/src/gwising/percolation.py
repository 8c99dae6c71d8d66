"""Bernoulli bond percolation on random trees.

Edges are open with probability ``theta``.  Every edge carries one uniform
``u`` and is open at ``theta`` iff ``u < theta``; reusing the uniforms across
a grid of ``theta`` values couples the clusters, so they are nested and
survival is monotone in ``theta`` replica by replica.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ._rng import derive_seed, make_rng
from .degree_model import DegreeDistribution, size_biased
from .tree_synth import DEFAULT_VERTEX_CAP, RootedTree, VertexCapExceeded, _tables


@dataclass(frozen=True)
class PercolationOutcome:
    theta: float
    shell_sizes: np.ndarray

    @property
    def survived(self) -> np.ndarray:
        """Whether the root's open cluster reaches each level ``0..depth``."""
        return self.shell_sizes > 0

    def survived_to(self, depth: int) -> bool:
        return bool(self.shell_sizes[depth] > 0)


def edge_uniforms(tree: RootedTree, rng: np.random.Generator) -> np.ndarray:
    """One uniform per vertex; entry ``v`` belongs to the edge from ``v`` to its parent."""
    u = np.zeros(tree.n_vertices)
    u[1:] = rng.random(tree.n_edges)
    return u


def _path_max(tree: RootedTree, u: np.ndarray) -> np.ndarray:
    pmax = np.zeros(tree.n_vertices)
    for lvl in range(1, tree.depth + 1):
        sl = tree.level_slice(lvl)
        pmax[sl] = np.maximum(u[sl], pmax[tree.parent[sl]])
    return pmax


def _outcome(tree, pmax, theta):
    inside = pmax < theta
    return PercolationOutcome(float(theta), np.bincount(tree.level[inside], minlength=tree.depth + 1))


def percolate(tree: RootedTree, theta: float, rng=None, uniforms=None) -> PercolationOutcome:
    """Open-cluster shell sizes of the root for one bond probability."""
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    u = edge_uniforms(tree, rng) if uniforms is None else uniforms
    return _outcome(tree, _path_max(tree, u), theta)


def percolate_coupled(tree: RootedTree, thetas: Sequence[float], rng=None, uniforms=None):
    """One outcome per ``theta``, all driven by the same edge uniforms."""
    for t in thetas:
        if not 0 < t < 1:
            raise ValueError(f"theta must lie in (0, 1), got {t}")
    u = edge_uniforms(tree, rng) if uniforms is None else uniforms
    pmax = _path_max(tree, u)
    return [_outcome(tree, pmax, t) for t in thetas]


def explore_cluster(
    model: str,
    dist: DegreeDistribution,
    thetas: Sequence[float],
    depth: int,
    rng: np.random.Generator,
    s: Optional[int] = None,
    root_law: str = "process",
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> np.ndarray:
    """Open-cluster shell sizes, shape ``(len(thetas), depth + 1)``, for one random tree.

    Only the cluster of ``max(thetas)`` is generated: per level, one uniform
    per frontier vertex for its offspring (as in
    :func:`~gwising.tree_synth.generate`), then one uniform per child edge.
    Children whose path maximum reaches ``max(thetas)`` are discarded before
    their own offspring are drawn.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    top = thetas.max()
    root_tab, root_shift, dist_tab, ord_tab, s_eff, root_dist = _tables(model, dist, s, root_law)
    sizes = np.zeros((thetas.size, depth + 1), dtype=np.int64)
    kind = np.array([root_dist])
    pmax = np.zeros(1)
    explored = 1
    for lvl in range(depth + 1):
        sizes[:, lvl] = (pmax[None, :] < thetas[:, None]).sum(axis=1)
        if lvl == depth or kind.size == 0:
            break
        u = rng.random(kind.size)
        if lvl == 0:
            m = root_tab.quantile(u) - root_shift
        else:
            m = np.empty(kind.size, dtype=np.int64)
            m[~kind] = ord_tab.quantile(u[~kind]) - 1
            if dist_tab is not None and kind.any():
                m[kind] = dist_tab.quantile(u[kind]) - 1
        n_child = int(m.sum())
        first = np.cumsum(m) - m
        rank = np.arange(n_child) - np.repeat(first, m)
        child_kind = np.repeat(kind, m) & (rank < s_eff)
        child_pmax = np.maximum(np.repeat(pmax, m), rng.random(n_child))
        keep = child_pmax < top
        kind, pmax = child_kind[keep], child_pmax[keep]
        explored += kind.size
        if explored > vertex_cap:
            raise VertexCapExceeded(lvl, explored, vertex_cap)
    return sizes


@dataclass(frozen=True)
class SurvivalCurve:
    thetas: np.ndarray
    depth: int
    replicas: int
    survival: np.ndarray  # shape (len(thetas), depth + 1): P(cluster reaches level n)
    survived: np.ndarray  # shape (replicas, len(thetas)) at the target depth

    @property
    def at_depth(self) -> np.ndarray:
        return self.survival[:, self.depth]

    @property
    def stderr(self) -> np.ndarray:
        p = self.at_depth
        return np.sqrt(p * (1.0 - p) / self.replicas)


def _replica_sizes(args):
    model, dist, thetas, depth, base_seed, index, s, root_law, cap = args
    rng = make_rng(derive_seed(base_seed, index))
    return explore_cluster(model, dist, thetas, depth, rng, s=s, root_law=root_law, vertex_cap=cap)


def survival_curve(
    model: str,
    dist: DegreeDistribution,
    thetas: Sequence[float],
    depth: int,
    replicas: int,
    base_seed: int,
    s: Optional[int] = None,
    root_law: str = "process",
    workers: int = 1,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> SurvivalCurve:
    """Monte Carlo probability that the root's open cluster reaches each level."""
    thetas = np.asarray(thetas, dtype=np.float64)
    if np.any((thetas <= 0) | (thetas >= 1)):
        raise ValueError("every theta must lie in (0, 1)")
    jobs = [(model, dist, thetas, depth, base_seed, i, s, root_law, vertex_cap) for i in range(replicas)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sizes = list(pool.map(_replica_sizes, jobs, chunksize=max(1, replicas // (8 * workers))))
    else:
        sizes = [_replica_sizes(job) for job in jobs]
    alive = np.stack(sizes) > 0  # (replicas, thetas, depth + 1)
    return SurvivalCurve(
        thetas=thetas,
        depth=depth,
        replicas=replicas,
        survival=alive.mean(axis=0),
        survived=alive[:, :, depth],
    )


def cpn_threshold(a: float, s: int, alpha: float) -> float:
    """Bond probability below which GW(s, p) has no infinite open cluster.

    Equals ``min(q(K_c), q(K_hat_c)) = min(1/(a-1), s**(-1/alpha))``; the
    closed form is returned to avoid an exp/log round trip.
    """
    if not a > 2 or s < 2 or not 0 < alpha < 1:
        raise ValueError("need a > 2, s >= 2, alpha in (0, 1)")
    return min(1.0 / (a - 1.0), float(s) ** (-1.0 / alpha))


def offspring_law(dist: DegreeDistribution, model: str = "gw") -> dict[int, float]:
    """Offspring law of a non-root vertex: ``k - 1`` with ``k ~ p`` (gw) or ``k ~ p_hat`` (config)."""
    if model == "gw":
        table = dist
    elif model == "config":
        table = size_biased(dist)
    else:
        raise ValueError("single-type offspring law exists for 'gw' and 'config' only")
    return {int(k) - 1: float(p) for k, p in zip(table.ks, table.probs) if p > 0}


def gw_extinction_oracle(
    law: Mapping[int, float],
    theta: float,
    depth: Optional[int] = None,
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
) -> float:
    """Extinction probability of the open cluster of a single-type GW tree.

    Iterates ``q <- f(1 - theta + theta q)`` from ``q = 0``, with ``f`` the
    offspring generating function.  With ``depth`` given, returns the
    ``depth``-th iterate: the probability that the cluster misses level
    ``depth``.  Otherwise iterates to the smallest fixed point.
    """
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    ms = np.array(sorted(law), dtype=np.float64)
    ps = np.array([law[int(m)] for m in ms], dtype=np.float64)
    if np.any(ms < 0) or abs(math.fsum(ps) - 1) > 1e-12:
        raise ValueError("offspring law must be a probability table on non-negative integers")

    def step(q):
        return float(np.dot(ps, (1.0 - theta + theta * q) ** ms))

    q = 0.0
    if depth is not None:
        for _ in range(depth):
            q = step(q)
        return q
    mean = theta * float(np.dot(ps, ms))
    one_child = theta == 1 and law.get(1, 0.0) == 1.0
    if mean <= 1 and not one_child:
        return 1.0
    for _ in range(max_iter):
        nxt = step(q)
        if abs(nxt - q) < tol:
            return nxt
        q = nxt
    raise RuntimeError("extinction iteration did not converge")
