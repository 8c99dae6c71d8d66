"""Random rooted trees: Galton-Watson, configuration model and GW(s, p).

Trees are generated breadth first.  Every vertex of a level consumes exactly
one uniform from the generator, in left-to-right order, which is mapped to a
degree through the inverse CDF of the vertex's law; this fixes the
seed -> tree map.  Levels ``0..depth`` are materialized; the level below is
kept only as a per-vertex *stub count* (the offspring drawn by the last
level), which is all a fixed-boundary Gibbs measure needs.

Offspring laws by vertex type (``p`` the degree law, ``p_hat`` its size-biased
version, "degree" meaning offspring + 1 except at the root):

=================  ======================  ==========================
model              root offspring          other vertices
=================  ======================  ==========================
``gw``             k - 1, k ~ p            k - 1, k ~ p
``config``         k, k ~ p                k - 1, k ~ p_hat
``gws`` (s)        m ~ p_hat (see below)   distinguished: k - 1, k ~ p_hat;
                                           ordinary: k - 1, k ~ p
``size-biased``    ``gws`` with s = 1
=================  ======================  ==========================

In ``gws`` a distinguished vertex with m offspring marks its first
``min(m, s)`` children distinguished and the remaining ``(m - s)_+`` ordinary
(the *immigrants*).  The root law defaults to ``root_law="process"``
(offspring m with probability ``p_hat_m``); ``root_law="visualization"``
gives the root the same law as every other distinguished vertex
(offspring m with probability ``p_hat_{m+1}``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .degree_model import (
    DegreeDistribution,
    SizeBiasedDistribution,
    require_valid,
    size_biased,
)

DEFAULT_VERTEX_CAP = 5_000_000
MODELS = ("gw", "config", "gws", "size-biased")
ROOT_LAWS = ("process", "visualization")


class VertexCapExceeded(RuntimeError):
    def __init__(self, depth_reached: int, requested: int, cap: int):
        super().__init__(
            f"tree would exceed {cap} vertices ({requested} requested) "
            f"after completing level {depth_reached}"
        )
        self.depth_reached = depth_reached
        self.requested = requested
        self.cap = cap


class RootedTree:
    """Finite-depth realization stored as flat arrays in breadth-first order.

    ``offspring[v]`` is the number of children drawn for ``v``; for vertices
    on the last level ``depth`` these children are not materialized and the
    count is the vertex's boundary stub count.
    """

    def __init__(self, parent, level, distinguished, offspring, depth, model, s=0, root_law=None):
        self.parent = np.asarray(parent, dtype=np.int64)
        self.level = np.asarray(level, dtype=np.int64)
        self.distinguished = np.asarray(distinguished, dtype=bool)
        self.offspring = np.asarray(offspring, dtype=np.int64)
        self.depth = int(depth)
        self.model = model
        self.s = int(s)
        self.root_law = root_law
        counts = np.bincount(self.level, minlength=self.depth + 1)
        self.level_offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        internal = np.where(self.level < self.depth, self.offspring, 0)
        self.child_start = 1 + np.concatenate([[0], np.cumsum(internal)[:-1]]).astype(np.int64)

    @property
    def n_vertices(self) -> int:
        return int(self.parent.size)

    @property
    def n_edges(self) -> int:
        return self.n_vertices - 1

    def level_slice(self, n: int) -> slice:
        return slice(int(self.level_offsets[n]), int(self.level_offsets[n + 1]))

    def n_children(self, v: int) -> int:
        return int(self.offspring[v]) if self.level[v] < self.depth else 0

    def children(self, v: int) -> range:
        start = int(self.child_start[v])
        return range(start, start + self.n_children(v))

    @property
    def stubs(self) -> np.ndarray:
        """Stub count of each last-level vertex, in breadth-first order."""
        return self.offspring[self.level_slice(self.depth)]

    @property
    def n_stubs(self) -> int:
        return int(self.stubs.sum())

    def stub_owner(self) -> np.ndarray:
        last = np.arange(*self.level_slice(self.depth).indices(self.n_vertices))
        return np.repeat(last, self.stubs)

    def shell_sizes(self) -> np.ndarray:
        """``|S_n|`` for ``n = 0..depth``."""
        return np.diff(self.level_offsets)

    def degree(self) -> np.ndarray:
        """Graph degree of every materialized vertex, stub edges included."""
        deg = self.offspring.copy()
        deg[1:] += 1
        return deg

    def truncate(self, depth: int) -> "RootedTree":
        """The ball of radius ``depth``; level ``depth + 1`` becomes stubs."""
        if not 0 <= depth <= self.depth:
            raise ValueError(f"cannot truncate depth-{self.depth} tree to {depth}")
        end = int(self.level_offsets[depth + 1])
        return RootedTree(
            self.parent[:end],
            self.level[:end],
            self.distinguished[:end],
            self.offspring[:end],
            depth,
            self.model,
            self.s,
            self.root_law,
        )

    def check(self) -> list[str]:
        """Structural invariants; returns the list of violated ones."""
        problems = []
        n = self.n_vertices
        if n == 0 or self.parent[0] != -1 or self.level[0] != 0:
            problems.append("root must be vertex 0 at level 0 with no parent")
        if np.count_nonzero(self.parent < 0) != 1:
            problems.append("exactly one root expected")
        nonroot = np.arange(1, n)
        if np.any(self.parent[1:] >= nonroot) or np.any(self.level[1:] != self.level[self.parent[1:]] + 1):
            problems.append("child level must equal parent level + 1")
        kids = np.bincount(self.parent[1:], minlength=n)
        if np.any(kids[self.level < self.depth] != self.offspring[self.level < self.depth]):
            problems.append("materialized children disagree with offspring counts")
        if np.any(self.offspring < 0):
            problems.append("negative offspring count")
        dist = self.distinguished
        if self.model in ("gw", "config"):
            if dist.any():
                problems.append(f"{self.model} tree has distinguished vertices")
        else:
            if np.any(dist[1:] & ~dist[self.parent[1:]]):
                problems.append("ordinary vertex has a distinguished child")
            dkids = np.bincount(self.parent[1:][dist[1:]], minlength=n)
            if np.any(dkids > self.s):
                problems.append(f"more than s={self.s} distinguished children")
            lhat = np.bincount(self.level[dist], minlength=self.depth + 1)
            if np.any(lhat > float(self.s) ** np.arange(self.depth + 1)):
                problems.append("distinguished count exceeds s**n")
        return problems


def _tables(model: str, dist: DegreeDistribution, s: Optional[int], root_law: str):
    """(root table, root shift, distinguished table, ordinary table, s, root distinguished)."""
    require_valid(dist)
    if model == "gw":
        return dist, 1, None, dist, 0, False
    if model == "config":
        return dist, 0, None, size_biased(dist), 0, False
    if model == "size-biased":
        model, s = "gws", 1
    if model != "gws":
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    if s is None or int(s) != s or s < 1:
        raise ValueError(f"gws needs an integer s >= 1, got {s}")
    if root_law not in ROOT_LAWS:
        raise ValueError(f"root_law must be one of {ROOT_LAWS}")
    sb = size_biased(dist)
    return sb, (0 if root_law == "process" else 1), sb, dist, int(s), True


def generate(
    model: str,
    dist: DegreeDistribution,
    depth: int,
    rng: np.random.Generator,
    s: Optional[int] = None,
    root_law: str = "process",
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> RootedTree:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    root_tab, root_shift, dist_tab, ord_tab, s_eff, root_dist = _tables(model, dist, s, root_law)

    parents = [np.array([-1], dtype=np.int64)]
    kinds = [np.array([root_dist])]
    offspring = []
    total = 1
    for lvl in range(depth + 1):
        kind = kinds[-1]
        u = rng.random(kind.size)
        if lvl == 0:
            m = root_tab.quantile(u) - root_shift
        else:
            m = np.empty(kind.size, dtype=np.int64)
            ordinary = ~kind
            m[ordinary] = ord_tab.quantile(u[ordinary]) - 1
            if dist_tab is not None and kind.any():
                m[kind] = dist_tab.quantile(u[kind]) - 1
        offspring.append(m)
        if lvl == depth:
            break
        n_child = int(m.sum())
        if total + n_child > vertex_cap:
            raise VertexCapExceeded(lvl, total + n_child, vertex_cap)
        ids = np.arange(total - kind.size, total, dtype=np.int64)
        first = np.cumsum(m) - m
        rank = np.arange(n_child) - np.repeat(first, m)
        parents.append(np.repeat(ids, m))
        kinds.append(np.repeat(kind, m) & (rank < s_eff))
        total += n_child

    level = np.repeat(np.arange(depth + 1), [k.size for k in kinds])
    tag = "size-biased" if model == "size-biased" else model
    return RootedTree(
        np.concatenate(parents),
        level,
        np.concatenate(kinds),
        np.concatenate(offspring),
        depth,
        tag,
        s_eff,
        root_law if s_eff else None,
    )


def gen_gw(dist, depth, rng, **kw) -> RootedTree:
    return generate("gw", dist, depth, rng, **kw)


def gen_config(dist, depth, rng, **kw) -> RootedTree:
    return generate("config", dist, depth, rng, **kw)


def gen_gws(dist, s, depth, rng, **kw) -> RootedTree:
    return generate("gws", dist, depth, rng, s=s, **kw)


def gen_size_biased(dist, depth, rng, **kw) -> RootedTree:
    return generate("size-biased", dist, depth, rng, **kw)


@dataclass(frozen=True)
class GrowthTrace:
    """Per-generation counts of one realization, ``n = 0..depth``."""

    Lhat: np.ndarray
    L: np.ndarray
    Y: np.ndarray

    @property
    def shell(self) -> np.ndarray:
        return self.Lhat + self.L

    @property
    def depth(self) -> int:
        return self.Lhat.size - 1


def growth_trace(tree: RootedTree) -> GrowthTrace:
    nlev = tree.depth + 1
    d = tree.distinguished
    lhat = np.bincount(tree.level[d], minlength=nlev)
    lord = np.bincount(tree.level[~d], minlength=nlev)
    immigrant = np.zeros(tree.n_vertices, dtype=bool)
    immigrant[1:] = ~d[1:] & d[tree.parent[1:]]
    y = np.bincount(tree.level[immigrant], minlength=nlev)
    return GrowthTrace(lhat, lord, y)


def normalized_growth(trace: GrowthTrace, c: float):
    """``(shell_n / c**n, L_n / c**n)`` for every generation."""
    if not c > 1:
        raise ValueError(f"c must exceed 1, got {c}")
    scale = float(c) ** -np.arange(trace.depth + 1)
    return trace.shell * scale, trace.L * scale


def immigrant_tail(trace: GrowthTrace, c: float) -> np.ndarray:
    """Running sums ``sum_{1 <= n <= N} c**-n Y_n`` for ``N = 1..depth``."""
    if not c > 1:
        raise ValueError(f"c must exceed 1, got {c}")
    n = np.arange(1, trace.depth + 1)
    return np.cumsum(trace.Y[1:] * float(c) ** -n)


def sigma_rate(sb: SizeBiasedDistribution, s: int) -> float:
    """Mean number of distinguished children of a non-root distinguished vertex."""
    if int(s) != s or s < 2:
        raise ValueError(f"s must be an integer >= 2, got {s}")
    probs = sb.as_dict()
    sigma = s - math.fsum((s - k + 1) * probs.get(k, 0.0) for k in range(2, s + 1))
    if not 1 < sigma <= s:
        raise ValueError(f"sigma = {sigma} outside (1, {s}]; table is degenerate")
    return sigma


def root_distinguished_mean(dist: DegreeDistribution, s: int, root_law: str = "process") -> float:
    """``E[min(m, s)]`` for the root's offspring m; ``E[Lhat_1]``."""
    sb = size_biased(dist)
    m = sb.ks - (0 if root_law == "process" else 1)
    return math.fsum(np.minimum(m, s) * sb.probs)


def expected_distinguished(dist: DegreeDistribution, s: int, n: int, root_law: str = "process") -> float:
    """``E[Lhat_n]`` in ``gws(s)``: root mean times ``sigma**(n-1)``."""
    if n == 0:
        return 1.0
    sb = size_biased(dist)
    sigma = math.fsum(np.minimum(sb.ks - 1, s) * sb.probs)
    return root_distinguished_mean(dist, s, root_law) * sigma ** (n - 1)


def simulate_counts(
    model: str,
    dist: DegreeDistribution,
    depth: int,
    rng: np.random.Generator,
    s: Optional[int] = None,
    root_law: str = "process",
    track_ordinary: bool = True,
    draw_cap: int = 50_000_000,
) -> GrowthTrace:
    """Generation sizes without building the tree.

    Same law as :func:`growth_trace` of :func:`generate`, but the generator
    stream is consumed differently (distinguished draws first, then ordinary,
    per level), so realizations do not coincide for a given seed.  With
    ``track_ordinary=False`` the ordinary population is not propagated and
    ``L_n`` holds only the immigrants ``Y_n``.
    """
    root_tab, root_shift, dist_tab, ord_tab, s_eff, root_dist = _tables(model, dist, s, root_law)
    lhat = np.zeros(depth + 1, dtype=np.int64)
    lord = np.zeros(depth + 1, dtype=np.int64)
    y = np.zeros(depth + 1, dtype=np.int64)
    if root_dist:
        lhat[0] = 1
    else:
        lord[0] = 1
    for n in range(depth):
        drawn = 0
        if lhat[n]:
            tab, shift = (root_tab, root_shift) if n == 0 else (dist_tab, 1)
            m = tab.quantile(rng.random(int(lhat[n]))) - shift
            drawn += m.size
            lhat[n + 1] = np.minimum(m, s_eff).sum()
            y[n + 1] = np.maximum(m - s_eff, 0).sum()
        births = 0
        if lord[n] and (track_ordinary or n == 0):
            tab, shift = (root_tab, root_shift) if n == 0 else (ord_tab, 1)
            remaining = int(lord[n])
            if drawn + remaining > draw_cap:
                raise VertexCapExceeded(n, drawn + remaining, draw_cap)
            while remaining:
                chunk = min(remaining, 1_000_000)
                births += int((tab.quantile(rng.random(chunk)) - shift).sum())
                remaining -= chunk
        lord[n + 1] = births + y[n + 1]
    return GrowthTrace(lhat, lord, y)


TREE_FORMAT_VERSION = "gwising-tree 1"


def write_tree(tree: RootedTree, path, dist: Optional[DegreeDistribution] = None, seed=None) -> None:
    """Line-oriented text: ``id parent level kind stub_count`` after a ``#`` header."""
    stub_count = np.where(tree.level == tree.depth, tree.offspring, 0)
    with open(path, "w") as fh:
        fh.write(f"# {TREE_FORMAT_VERSION}\n")
        fh.write(f"# model={tree.model}\n")
        fh.write(f"# s={tree.s}\n")
        if tree.root_law:
            fh.write(f"# root_law={tree.root_law}\n")
        fh.write(f"# dist_hash={dist.fingerprint() if dist is not None else 'none'}\n")
        fh.write(f"# seed={seed if seed is not None else 'none'}\n")
        fh.write(f"# depth={tree.depth}\n")
        fh.write("# id parent level kind stub_count\n")
        for v in range(tree.n_vertices):
            kind = "distinguished" if tree.distinguished[v] else "ordinary"
            fh.write(f"{v} {tree.parent[v]} {tree.level[v]} {kind} {stub_count[v]}\n")


def read_tree(path) -> tuple[RootedTree, dict]:
    header = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    header[key.strip()] = value.strip()
                continue
            vid, par, lvl, kind, stubs = line.split()
            rows.append((int(vid), int(par), int(lvl), kind == "distinguished", int(stubs)))
    if not rows:
        raise ValueError(f"{path}: no vertices")
    rows.sort()
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ValueError(f"{path}: vertex ids must be 0..n-1")
    parent = np.array([r[1] for r in rows])
    level = np.array([r[2] for r in rows])
    depth = int(header.get("depth", level.max()))
    offspring = np.array([r[4] for r in rows])
    inner = level < depth
    offspring[inner] = np.bincount(parent[1:], minlength=len(rows))[inner]
    tree = RootedTree(
        parent,
        level,
        [r[3] for r in rows],
        offspring,
        depth,
        header.get("model", "gw"),
        int(header.get("s", 0)),
        header.get("root_law"),
    )
    return tree, header
