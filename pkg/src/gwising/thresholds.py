"""Closed-form critical couplings, temperatures and decay budgets.

Temperatures are in units of ``J / k_B`` (Boltzmann constant set to 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .degree_model import DegreeDistribution, mean_degree, second_moment


class BoundInapplicable(ValueError):
    """The contraction coefficient is not below 1, so the boundary bound says nothing."""


def q_of_K(K: float) -> float:
    """Contraction coefficient ``exp(4K) - 1``."""
    if not K > 0:
        raise ValueError(f"K must be positive, got {K}")
    return math.expm1(4.0 * K)


def K_c(a: float) -> float:
    if not a > 2:
        raise ValueError(f"mean degree must exceed 2, got {a}")
    return 0.25 * math.log(a / (a - 1.0))


def K_hat_c(s: int, alpha: float) -> float:
    if s < 2 or not 0 < alpha < 1:
        raise ValueError("need s >= 2 and alpha in (0, 1)")
    sg = float(s) ** (1.0 / alpha)
    return 0.25 * math.log((sg + 1.0) / sg)


def K_of_c(c: float) -> float:
    """Coupling below which ``q(K) < 1/c``."""
    if not c > 1:
        raise ValueError(f"c must exceed 1, got {c}")
    return 0.25 * math.log((c + 1.0) / c)


def growth_constant(a: float, s: int, alpha: float) -> float:
    """Smallest admissible shell growth constant ``max(a - 1, s**(1/alpha))``."""
    return max(a - 1.0, float(s) ** (1.0 / alpha))


def lyons_K_crit(branching: float) -> float:
    """Coupling solving ``tanh K = 1 / branching``."""
    if not branching > 1:
        raise ValueError(f"branching number must exceed 1, got {branching}")
    return math.atanh(1.0 / branching)


def lyons_Tc(J: float, branching: float) -> float:
    """``J / arccoth(branching)`` with arccoth computed as ``atanh(1/x)``."""
    if not J > 0:
        raise ValueError("J must be positive")
    return J / lyons_K_crit(branching)


def network_Tc(J: float, k1: float, k2: float) -> float:
    """Critical temperature of the uncorrelated network from ``<k>`` and ``<k^2>``."""
    if not J > 0:
        raise ValueError("J must be positive")
    if not k2 > 2 * k1:
        raise ValueError("<k^2> <= 2<k>: ordered at all temperatures regime has no finite T_c here")
    return 2.0 * J / math.log(k2 / (k2 - 2.0 * k1))


def r2_budget(K: float, n: int, n_z: int, shell_n: int) -> float:
    """Upper bound ``2 q(K)**(n - n_z) |S_n|`` on a boundary-induced magnetization gap."""
    q = q_of_K(K)
    if not q < 1:
        raise BoundInapplicable(f"q(K) = {q:.6g} >= 1; bound inapplicable")
    if not n > n_z:
        raise ValueError(f"need n > n_z, got n={n}, n_z={n_z}")
    return 2.0 * q ** (n - n_z) * shell_n


@dataclass(frozen=True)
class DecayFit:
    rate: float
    r_squared: float
    depths_used: tuple
    dropped: tuple
    degenerate: bool = False


FIT_FLOOR = 1e-12


def fit_decay(depths: Sequence[int], means: Sequence[float], min_points: int = 4) -> DecayFit:
    """Geometric rate ``exp(slope)`` of an unweighted least-squares fit of ``log(mean)`` on depth.

    Means below ``FIT_FLOOR`` are dropped with a warning; fewer than
    ``min_points`` surviving depths give a degenerate fit with ``rate = nan``.
    """
    depths = np.asarray(depths, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    keep = means >= FIT_FLOOR
    dropped = tuple(int(d) for d in depths[~keep])
    if dropped:
        warnings.warn(f"fit_decay: dropping depths {dropped} with mean below {FIT_FLOOR:g}", stacklevel=2)
    used = tuple(int(d) for d in depths[keep])
    if keep.sum() < min_points:
        return DecayFit(math.nan, math.nan, used, dropped, degenerate=True)
    res = stats.linregress(depths[keep], np.log(means[keep]))
    return DecayFit(math.exp(res.slope), res.rvalue**2, used, dropped)


@dataclass(frozen=True)
class ThresholdSheet:
    q_of_K: Optional[float]
    K_c: float
    K_hat_c: Optional[float]
    K_of_c: Optional[float]
    T_c_lyons: float
    T_c_network: Optional[float]
    decay_budget: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def threshold_sheet(
    dist: DegreeDistribution,
    s: int = 0,
    alpha: Optional[float] = None,
    J: float = 1.0,
    beta: Optional[float] = None,
) -> ThresholdSheet:
    """Every scalar threshold for one parameter point.

    ``T_c_lyons`` uses branching number ``a - 1`` (the ordinary GW tree) and
    ``T_c_network`` the moments of ``dist`` (the size-biased GW tree).
    ``K_of_c`` and ``decay_budget = q(beta J) * c`` use
    ``c = max(a - 1, s**(1/alpha))`` when ``s >= 2`` and ``c = a - 1`` otherwise.
    """
    a = mean_degree(dist)
    k2 = second_moment(dist)
    kc = K_c(a)
    khat = K_hat_c(s, alpha) if s >= 2 and alpha is not None else None
    c = growth_constant(a, s, alpha) if khat is not None else a - 1.0
    kofc = K_of_c(c) if c > 1 else None
    q = q_of_K(beta * J) if beta is not None else None
    try:
        tnet = network_Tc(J, a, k2)
    except ValueError:
        tnet = None
    return ThresholdSheet(
        q_of_K=q,
        K_c=kc,
        K_hat_c=khat,
        K_of_c=kofc,
        T_c_lyons=lyons_Tc(J, a - 1.0),
        T_c_network=tnet,
        decay_budget=None if q is None else q * c,
    )
