"""Degree laws on {2, 3, ...}, their moments, and inverse-CDF sampling.

A :class:`DegreeDistribution` is a finite table ``k -> p_k`` with every
``k >= 2``.  Power laws with infinite support are represented by truncation at
an explicit cutoff ``kmax`` and renormalized; whether a functional diverges as
the cutoff is removed is diagnosed numerically by cutoff doubling
(:func:`cutoff_doubling`).
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

NORMALIZATION_TOL = 1e-12


class InvalidDistribution(ValueError):
    """Raised when an operation receives a table that fails :func:`validate`."""


class _Table:
    """Finite probability table over integer degrees, sampled by inverse CDF."""

    def __init__(self, ks, probs):
        ks = np.asarray(ks, dtype=np.int64)
        probs = np.asarray(probs, dtype=np.float64)
        if ks.ndim != 1 or ks.shape != probs.shape or ks.size == 0:
            raise ValueError("ks and probs must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(ks) <= 0):
            order = np.argsort(ks, kind="stable")
            ks, probs = ks[order], probs[order]
            if np.any(np.diff(ks) == 0):
                raise ValueError("duplicate degree in table")
        ks.setflags(write=False)
        probs.setflags(write=False)
        self.ks = ks
        self.probs = probs
        cdf = np.cumsum(probs)
        cdf.setflags(write=False)
        self._cdf = cdf

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(p) for k, p in zip(self.ks, self.probs)}

    @property
    def kmax(self) -> int:
        return int(self.ks[-1])

    def mean(self) -> float:
        return math.fsum(self.ks * self.probs)

    def quantile(self, u):
        """Map uniforms in [0, 1) to degrees through the cumulative table."""
        idx = np.searchsorted(self._cdf, u, side="right")
        return self.ks[np.minimum(idx, self.ks.size - 1)]

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.ks.tobytes())
        h.update(self.probs.tobytes())
        return h.hexdigest()[:16]

    def __repr__(self):
        if self.ks.size <= 8:
            body = ", ".join(f"{k}: {p:.6g}" for k, p in self.as_dict().items())
        else:
            body = f"{self.ks.size} atoms, k in [{self.ks[0]}, {self.ks[-1]}]"
        return f"{type(self).__name__}({{{body}}})"


class DegreeDistribution(_Table):
    """Degree law ``p = {p_k}`` of a random tree.

    Use :meth:`from_dict`, :meth:`power_law` or :meth:`parse` rather than the
    raw constructor.  Construction does not validate; operations that need a
    valid law call :func:`validate` and raise :class:`InvalidDistribution`.
    """

    def __init__(self, ks, probs, kind: str = "explicit-table", lam: Optional[float] = None):
        super().__init__(ks, probs)
        self.kind = kind
        self.lam = lam

    @classmethod
    def from_dict(cls, table: Mapping[int, float]) -> "DegreeDistribution":
        items = sorted(table.items())
        return cls([k for k, _ in items], [p for _, p in items])

    @classmethod
    def power_law(cls, lam: float, kmax: int) -> "DegreeDistribution":
        """``p_k`` proportional to ``k**-lam`` on ``2..kmax``, renormalized."""
        if not lam > 2:
            raise InvalidDistribution(f"power-law exponent must exceed 2, got {lam}")
        if int(kmax) < 3:
            raise InvalidDistribution(f"power-law cutoff must be >= 3, got {kmax}")
        ks = np.arange(2, int(kmax) + 1, dtype=np.int64)
        w = ks.astype(np.float64) ** (-float(lam))
        return cls(ks, w / math.fsum(w), kind="truncated-power-law", lam=float(lam))

    @classmethod
    def parse(cls, spec: str) -> "DegreeDistribution":
        """Build a law from ``powerlaw:lambda=2.5,kmax=1000``, ``2:0.5,3:0.5`` or a file path.

        Files hold one ``k p_k`` pair per line; ``#`` starts a comment.
        """
        spec = spec.strip()
        if spec.startswith("powerlaw:"):
            params = dict(item.split("=", 1) for item in spec[len("powerlaw:"):].split(","))
            try:
                return cls.power_law(float(params["lambda"]), int(params["kmax"]))
            except KeyError as exc:
                raise InvalidDistribution(f"power-law spec missing {exc}") from None
        if os.path.exists(spec):
            return read_distribution(spec)
        table = {}
        for item in spec.split(","):
            k, p = item.split(":")
            table[int(k)] = float(p)
        return cls.from_dict(table)

    def spec_string(self) -> str:
        if self.kind == "truncated-power-law":
            return f"powerlaw:lambda={self.lam:g},kmax={self.kmax}"
        return ",".join(f"{k}:{p!r}" for k, p in self.as_dict().items())


class SizeBiasedDistribution(_Table):
    """``p_hat_k = k p_k / a``: the degree law of a neighbour reached along an edge."""

    def __init__(self, ks, probs, parent: DegreeDistribution):
        super().__init__(ks, probs)
        self.parent = parent


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violation: Optional[str] = None

    def __bool__(self):
        return self.ok


def validate(dist: _Table) -> ValidationReport:
    """Check the degree-law hypotheses; report the first clause that fails."""
    ks, probs = dist.ks, dist.probs
    if np.any(ks < 2):
        return ValidationReport(False, f"degree k = {int(ks.min())} < 2")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        return ValidationReport(False, "p_k negative or not finite")
    total = math.fsum(probs)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        return ValidationReport(False, f"sum ≠ 1 (sum = {total!r})")
    support = ks[probs > 0]
    a = math.fsum(ks * probs)
    if support.size < 2:
        msg = "single-atom support"
        if a <= 2:
            msg += f" / a = {a:g} not > 2"
        return ValidationReport(False, msg)
    if np.any(probs >= 1):
        return ValidationReport(False, "p_k = 1 for some k")
    if not a > 2:
        return ValidationReport(False, f"a = {a!r} not > 2")
    return ValidationReport(True)


def require_valid(dist: _Table) -> None:
    report = validate(dist)
    if not report.ok:
        raise InvalidDistribution(report.violation)


def mean_degree(dist: DegreeDistribution) -> float:
    require_valid(dist)
    return math.fsum(dist.ks * dist.probs)


def second_moment(dist: DegreeDistribution) -> float:
    require_valid(dist)
    k = dist.ks.astype(np.float64)
    return math.fsum(k * k * dist.probs)


def xlogx_moment(dist: DegreeDistribution) -> float:
    """``b = sum_k k p_k ln k``, the quantity in the X log X condition."""
    require_valid(dist)
    k = dist.ks.astype(np.float64)
    return math.fsum(k * np.log(k) * dist.probs)


def size_biased(dist: DegreeDistribution) -> SizeBiasedDistribution:
    a = mean_degree(dist)
    return SizeBiasedDistribution(dist.ks, dist.ks * dist.probs / a, parent=dist)


def _check_alpha(s: int, alpha: float) -> None:
    if int(s) != s or s < 1:
        raise ValueError(f"s must be a positive integer, got {s}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def b_alpha(dist: DegreeDistribution, s: int, alpha: float) -> float:
    """``sum_{k >= s+1} (k - s)**alpha * p_hat_k`` over the support."""
    _check_alpha(s, alpha)
    sb = size_biased(dist)
    mask = sb.ks >= s + 1
    excess = (sb.ks[mask] - s).astype(np.float64)
    return math.fsum(excess**alpha * sb.probs[mask])


def immigrant_alpha_moment(dist: DegreeDistribution, s: int, alpha: float) -> float:
    """``E[(X_hat - s)_+ ** alpha]`` with offspring ``X_hat = k - 1``, ``k ~ p_hat``.

    This is the per-parent moment that bounds immigrant counts; it differs from
    :func:`b_alpha` by a unit index shift and never exceeds it.
    """
    _check_alpha(s, alpha)
    sb = size_biased(dist)
    excess = (sb.ks - 1 - s).astype(np.float64)
    mask = excess > 0
    return math.fsum(excess[mask] ** alpha * sb.probs[mask])


def sample_degree(dist: _Table, rng: np.random.Generator) -> int:
    return int(dist.quantile(rng.random()))


def sample_degrees(dist: _Table, rng: np.random.Generator, size: int) -> np.ndarray:
    return dist.quantile(rng.random(size))


@dataclass(frozen=True)
class CutoffDiagnostic:
    """Values of a functional at cutoffs ``kmax * 2**j`` and the verdict.

    ``increment_ratio`` compares the last two increments; for a tail whose
    terms fall like ``k**e`` it tends to ``2**(e + 1)``, which is below 1
    exactly when the untruncated sum converges.
    """

    cutoffs: tuple
    values: tuple
    increment_ratio: float
    verdict: str
    relative_change: float = field(default=0.0)


def cutoff_doubling(
    functional: Callable[[DegreeDistribution], float],
    lam: float,
    kmax: int,
    doublings: int = 2,
) -> CutoffDiagnostic:
    if doublings < 2:
        raise ValueError("need at least two doublings to compare increments")
    cutoffs = tuple(int(kmax) * 2**j for j in range(doublings + 1))
    values = tuple(functional(DegreeDistribution.power_law(lam, c)) for c in cutoffs)
    prev = values[-2] - values[-3]
    last = values[-1] - values[-2]
    if prev <= 0:
        ratio = 0.0 if last <= 0 else math.inf
    else:
        ratio = last / prev
    return CutoffDiagnostic(
        cutoffs=cutoffs,
        values=values,
        increment_ratio=ratio,
        verdict="growing" if ratio >= 1 else "stable",
        relative_change=values[-1] / values[0] - 1 if values[0] else math.inf,
    )


def b_alpha_diagnostic(lam: float, s: int, alpha: float, kmax: int = 1000, doublings: int = 2):
    return cutoff_doubling(lambda d: b_alpha(d, s, alpha), lam, kmax, doublings)


def read_distribution(path) -> DegreeDistribution:
    table = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidDistribution(f"{path}:{lineno}: expected 'k p_k'")
            k, p = int(parts[0]), float(parts[1])
            if k in table:
                raise InvalidDistribution(f"{path}:{lineno}: duplicate degree {k}")
            table[k] = p
    if not table:
        raise InvalidDistribution(f"{path}: no entries")
    return DegreeDistribution.from_dict(table)


def write_distribution(dist: _Table, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# degree table, {dist.ks.size} atoms\n")
        for k, p in zip(dist.ks, dist.probs):
            fh.write(f"{int(k)} {float(p)!r}\n")
