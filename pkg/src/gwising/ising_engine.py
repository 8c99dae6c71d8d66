"""Exact Ising marginals on finite trees with fixed boundary spins.

The measure on spins of levels ``0..n`` of a :class:`~gwising.tree_synth.RootedTree`
has weight::

    exp( sum_{edges in V_n} (K_xy s_x s_y + shift)
         + sum_{stub edges} K_xy s_x xi_y
         + sum_x h_x s_x )

where ``xi`` are the fixed boundary spins on level ``n + 1`` (one per stub)
and ``shift`` is either 0 or the coupling bound ``K_cap``; the shift changes
the partition function only.  ``h`` is the dimensionless field (beta times
the physical field).

Two solvers are provided: :func:`brute_marginals` enumerates all
configurations (small trees only) and :func:`bp_marginals` runs the exact
upward/downward message pass in the atanh ("cavity field") domain.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .tree_synth import RootedTree

FIELD_CLAMP = 30.0
BRUTE_MAX_VERTICES = 20
COUPLING_SCHEMES = ("constant", "iid-sign", "iid-uniform")


@dataclass(frozen=True)
class Couplings:
    """Per-edge couplings ``K_xy``.

    ``edge[v]`` couples ``v`` to its parent (``edge[0]`` is unused and zero);
    ``stub[i]`` couples the owner of stub ``i`` to its boundary spin.
    """

    edge: np.ndarray
    stub: np.ndarray
    K_cap: float

    def truncate(self, tree: RootedTree, depth: int) -> "Couplings":
        """Couplings of ``tree.truncate(depth)``: edges into level ``depth + 1`` become stubs."""
        if depth == tree.depth:
            return self
        end = int(tree.level_offsets[depth + 1])
        nxt = int(tree.level_offsets[depth + 2])
        return Couplings(self.edge[:end], self.edge[end:nxt], self.K_cap)


def assign_couplings(
    tree: RootedTree,
    scheme: str,
    J: float,
    beta: float,
    rng: Optional[np.random.Generator] = None,
    prob_minus: float = 0.5,
) -> Couplings:
    """Draw ``K_xy = beta * J_xy`` for every edge, stubs included.

    ``constant``: ``J_xy = J``; ``iid-sign``: ``J_xy = -J`` with probability
    ``prob_minus`` else ``J``; ``iid-uniform``: ``J_xy`` uniform on ``[-J, J]``.
    Edges are drawn first in vertex order, then stubs.
    """
    if not J > 0 or not beta > 0:
        raise ValueError("J and beta must be positive")
    K = beta * J
    n_edge, n_stub = tree.n_vertices, tree.n_stubs
    if scheme == "constant":
        edge = np.full(n_edge, K)
        stub = np.full(n_stub, K)
    elif scheme == "iid-sign":
        if not 0 <= prob_minus <= 1:
            raise ValueError("prob_minus must lie in [0, 1]")
        u = _require_rng(rng).random(n_edge - 1 + n_stub)
        sign = np.where(u < prob_minus, -1.0, 1.0)
        edge = np.concatenate([[K], K * sign[: n_edge - 1]])
        stub = K * sign[n_edge - 1 :]
    elif scheme == "iid-uniform":
        u = _require_rng(rng).uniform(-K, K, n_edge - 1 + n_stub)
        edge = np.concatenate([[0.0], u[: n_edge - 1]])
        stub = u[n_edge - 1 :]
    else:
        raise ValueError(f"unknown coupling scheme {scheme!r}; expected one of {COUPLING_SCHEMES}")
    edge[0] = 0.0
    return Couplings(edge, stub, K)


def _require_rng(rng):
    if rng is None:
        raise ValueError("random coupling schemes need an rng")
    return rng


@dataclass(frozen=True)
class Boundary:
    """Boundary preset: ``plus``, ``minus``, ``random`` (iid, ``prob_plus``), ``explicit`` or ``free``."""

    kind: str
    prob_plus: float = 0.5
    spins: Optional[tuple] = None

    @classmethod
    def plus(cls):
        return cls("plus")

    @classmethod
    def minus(cls):
        return cls("minus")

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def random(cls, prob_plus=0.5):
        return cls("random", prob_plus=prob_plus)

    @classmethod
    def explicit(cls, spins):
        return cls("explicit", spins=tuple(int(x) for x in spins))

    @classmethod
    def parse(cls, text: str) -> "Boundary":
        text = text.strip()
        if text in ("plus", "all-plus", "+"):
            return cls.plus()
        if text in ("minus", "all-minus", "-"):
            return cls.minus()
        if text == "free":
            return cls.free()
        if text.startswith("random"):
            _, _, p = text.partition(":")
            return cls.random(float(p) if p else 0.5)
        raise ValueError(f"unknown boundary preset {text!r}")

    def resolve(self, n_stubs: int, rng: Optional[np.random.Generator] = None) -> Optional[np.ndarray]:
        """Spin per stub, or ``None`` for the free boundary."""
        if self.kind == "free":
            return None
        if self.kind == "plus":
            return np.ones(n_stubs)
        if self.kind == "minus":
            return -np.ones(n_stubs)
        if self.kind == "random":
            return np.where(_require_rng(rng).random(n_stubs) < self.prob_plus, 1.0, -1.0)
        if self.kind == "explicit":
            spins = np.asarray(self.spins, dtype=np.float64)
            if spins.size != n_stubs or not np.all(np.abs(spins) == 1):
                raise ValueError(f"explicit boundary needs {n_stubs} spins of ±1, got {spins.size}")
            return spins
        raise ValueError(f"unknown boundary kind {self.kind!r}")


class SpinSystem:
    """Tree, couplings, field and one resolved boundary."""

    def __init__(self, tree: RootedTree, couplings: Couplings, boundary=None, field=None):
        self.tree = tree
        self.couplings = couplings
        n = tree.n_vertices
        if couplings.edge.shape != (n,) or couplings.stub.shape != (tree.n_stubs,):
            raise ValueError("couplings do not match the tree")
        if not couplings.K_cap > 0:
            raise ValueError("K_cap must be positive")
        bound = max(np.abs(couplings.edge).max(initial=0.0), np.abs(couplings.stub).max(initial=0.0))
        if bound > couplings.K_cap * (1 + 1e-12):
            raise ValueError(f"|K_xy| = {bound} exceeds K_cap = {couplings.K_cap}")
        if isinstance(boundary, Boundary):
            if boundary.kind == "random":
                raise ValueError("resolve random boundaries with Boundary.resolve(n_stubs, rng) first")
            boundary = boundary.resolve(tree.n_stubs)
        if boundary is not None:
            boundary = np.asarray(boundary, dtype=np.float64)
            if boundary.shape != (tree.n_stubs,) or not np.all(np.abs(boundary) == 1):
                raise ValueError("boundary needs one ±1 spin per stub")
        self.boundary = boundary
        self.field = np.zeros(n) if field is None else np.broadcast_to(np.asarray(field, dtype=np.float64), (n,)).copy()

    @property
    def has_field(self) -> bool:
        return bool(np.any(self.field != 0))

    def with_boundary(self, boundary) -> "SpinSystem":
        return SpinSystem(self.tree, self.couplings, boundary, self.field)

    def flipped(self) -> "SpinSystem":
        """Same system with every boundary spin reversed."""
        b = None if self.boundary is None else -self.boundary
        return SpinSystem(self.tree, self.couplings, b, self.field)

    def local_field(self) -> np.ndarray:
        """External field plus the boundary spins folded into their owners."""
        h = self.field.copy()
        if self.boundary is not None and self.tree.n_stubs:
            h += np.bincount(
                self.tree.stub_owner(),
                weights=self.couplings.stub * self.boundary,
                minlength=self.tree.n_vertices,
            )
        return h


@dataclass(frozen=True)
class MarginalReport:
    """Per-vertex magnetization and one-spin marginals."""

    M: np.ndarray
    rho_plus: np.ndarray
    clamp_events: int = 0
    log_Z: Optional[float] = None

    @property
    def rho_minus(self) -> np.ndarray:
        return 1.0 - self.rho_plus


def brute_marginals(system: SpinSystem, include_shift: bool = True) -> MarginalReport:
    """Exact marginals by summing over all ``2**N`` configurations."""
    tree = system.tree
    n = tree.n_vertices
    if n > BRUTE_MAX_VERTICES:
        raise ValueError(f"brute force limited to {BRUTE_MAX_VERTICES} vertices, tree has {n}")
    codes = np.arange(1 << n, dtype=np.int64)
    spins = (1 - 2 * ((codes[:, None] >> np.arange(n)) & 1)).astype(np.int8)
    log_w = spins @ system.local_field()
    shift = system.couplings.K_cap if include_shift else 0.0
    for v in range(1, n):
        bond = (spins[:, v] * spins[:, tree.parent[v]]).astype(np.float64)
        log_w += system.couplings.edge[v] * bond + shift
    top = log_w.max()
    w = np.exp(log_w - top)
    z = w.sum()
    rho_plus = np.array([w[spins[:, v] > 0].sum() for v in range(n)]) / z
    return MarginalReport(
        M=rho_plus - (1.0 - rho_plus),
        rho_plus=rho_plus,
        log_Z=float(top + np.log(z)),
    )


def bp_marginals(system: SpinSystem) -> MarginalReport:
    """Exact marginals by one upward and one downward sweep over the levels.

    Messages are fields ``u = atanh(tanh(K) tanh(H))``; a message whose
    magnitude exceeds ``FIELD_CLAMP`` is clamped and counted in
    ``clamp_events``.
    """
    tree = system.tree
    n = tree.n_vertices
    K = system.couplings.edge
    parent = tree.parent
    up = system.local_field()
    msg = np.zeros(n)
    clamps = 0

    def message(coupling, h):
        nonlocal clamps
        with np.errstate(divide="ignore"):
            out = np.arctanh(np.tanh(coupling) * np.tanh(h))
        over = np.abs(out) > FIELD_CLAMP
        if over.any():
            clamps += int(over.sum())
            out = np.clip(out, -FIELD_CLAMP, FIELD_CLAMP)
        return out

    for lvl in range(tree.depth, 0, -1):
        sl = tree.level_slice(lvl)
        msg[sl] = message(K[sl], up[sl])
        up += np.bincount(parent[sl], weights=msg[sl], minlength=n)

    full = up.copy()
    for lvl in range(1, tree.depth + 1):
        sl = tree.level_slice(lvl)
        cavity = full[parent[sl]] - msg[sl]
        full[sl] = up[sl] + message(K[sl], cavity)

    m = np.tanh(full)
    return MarginalReport(M=m, rho_plus=0.5 * (1.0 + m), clamp_events=clamps)


def marginals(system: SpinSystem, method: str = "bp") -> MarginalReport:
    if method == "bp":
        return bp_marginals(system)
    if method == "brute":
        return brute_marginals(system)
    raise ValueError(f"unknown method {method!r}")


BoundaryLike = Union[Boundary, np.ndarray, Sequence[float], None]


def boundary_gap(system: SpinSystem, xi: BoundaryLike, eta: BoundaryLike, method: str = "bp") -> np.ndarray:
    """``|M(xi) - M(eta)|`` at every vertex for two boundaries of the same system."""
    m_xi = marginals(system.with_boundary(xi), method).M
    m_eta = marginals(system.with_boundary(eta), method).M
    return np.abs(m_xi - m_eta)


def flip_symmetry_check(system: SpinSystem, method: str = "bp") -> Optional[float]:
    """``max_z |M_z(xi) + M_z(-xi)|``; ``None`` (with a warning) when a field is present."""
    if system.has_field:
        warnings.warn("flip symmetry holds only at zero field; check skipped", stacklevel=2)
        return None
    a = marginals(system, method).M
    b = marginals(system.flipped(), method).M
    return float(np.max(np.abs(a + b)))


def gauge_transform(system: SpinSystem) -> tuple[SpinSystem, np.ndarray]:
    """Flip spins on odd levels: returns the gauged system and the per-vertex sign.

    Every edge joins adjacent levels, so ``K_xy -> -K_xy`` on all edges and
    stubs; the boundary on level ``n + 1`` picks up ``(-1)**(n + 1)`` and the
    field picks up the vertex sign.  Marginals obey ``M_original = sign * M_gauged``.
    """
    tree = system.tree
    sign = np.where(tree.level % 2 == 0, 1.0, -1.0)
    c = system.couplings
    gauged = Couplings(-c.edge, -c.stub, c.K_cap)
    b = None if system.boundary is None else system.boundary * (-1.0) ** (tree.depth + 1)
    return SpinSystem(tree, gauged, b, system.field * sign), sign


def write_marginals_csv(report: MarginalReport, tree: RootedTree, path, header: Optional[dict] = None) -> None:
    """CSV ``vertex_id,level,M,rho_plus`` preceded by ``# key=value`` header lines."""
    with open(path, "w", newline="") as fh:
        for key, value in (header or {}).items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["vertex_id", "level", "M", "rho_plus"])
        for v in range(tree.n_vertices):
            writer.writerow([v, int(tree.level[v]), f"{report.M[v]:.12g}", f"{report.rho_plus[v]:.12g}"])
