"""Boyd indices and the non-closed-age experiment.

When C <= M(st) / (M(s) t^p) < 1 on the unit square, l_p^2 has no isometric
copy in l_M while block vectors with many equal small coordinates give
copies of distortion arbitrarily close to 1.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from orlicz_kit.embeddings import EmbeddingMap
from orlicz_kit.errors import InvalidInput, InvalidParameter
from orlicz_kit.luxemburg import LuxemburgSpace, OrliczVector, disjoint
from orlicz_kit.orlicz import GridSpec, OrliczFunction, inverse, make_power
from orlicz_kit.samples import random_disjoint_unit_pair, rng_for

logger = logging.getLogger(__name__)

BOYD_DECADES = 8
BOYD_COUNT = 1024
# refinement: 4x the points over 4x the decades
REFINE = 4
STABLE = math.log(1.01)
RESOLUTION = 1e-3
RATIO_GRID = GridSpec(1e-8, 1.0, 1024)
INTERIOR = 1e-3


def _log_extremes(M: OrliczFunction, decades: int, count: int):
    """For each t on the grid: max_s and min_s of log M(st) - log M(s)."""
    grid = GridSpec(10.0**-decades, 1.0, count)
    pts = grid.points()
    logs = M.log_eval(pts)
    upper = np.empty(pts.size)
    lower = np.empty(pts.size)
    for rows in np.array_split(np.arange(pts.size), max(1, pts.size // 256)):
        values = M.log_eval(pts[rows, None] * pts[None, :]) - logs[None, :]
        upper[rows] = values.max(axis=1)
        lower[rows] = values.min(axis=1)
    return np.log(pts), upper, lower, grid


@dataclass(frozen=True)
class BoydIndices:
    alpha_M: float
    beta_M: float
    alpha_bracket: Tuple[float, float]
    beta_bracket: Tuple[float, float]
    grid_spec: Dict[str, GridSpec]
    ratio_bounds: Optional["RatioBounds"] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha_M": self.alpha_M,
            "beta_M": self.beta_M,
            "alpha_bracket": list(self.alpha_bracket),
            "beta_bracket": list(self.beta_bracket),
            "grid_spec": {k: v.to_dict() for k, v in self.grid_spec.items()},
            "ratio_bounds": None if self.ratio_bounds is None else self.ratio_bounds.to_dict(),
        }


def _bisect(predicate, lo: float, hi: float) -> Tuple[float, float]:
    """Shrink [lo, hi] with predicate(lo) true and predicate(hi) false."""
    while hi - lo > RESOLUTION:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def boyd_indices(
    M: OrliczFunction,
    decades: int = BOYD_DECADES,
    count: int = BOYD_COUNT,
    q_max: float = 64.0,
) -> BoydIndices:
    """Estimate the Boyd indices by bisection on q.

    sup_{s,t} M(st) / (M(s) t^q) < infinity is read as: the log-sup over the
    base grid changes by less than log(1.01) on a grid with four times the
    points over four times the decades. Likewise for inf > 0.
    """
    log_t, upper, lower, base = _log_extremes(M, decades, count)
    log_t_fine, upper_fine, lower_fine, fine = _log_extremes(M, REFINE * decades, REFINE * count)

    def sup_finite(q):
        return np.max(upper_fine - q * log_t_fine) - np.max(upper - q * log_t) < STABLE

    def inf_positive(q):
        return np.min(lower - q * log_t) - np.min(lower_fine - q * log_t_fine) < STABLE

    if not sup_finite(1.0):
        logger.warning("sup M(st)/(M(s)t) is not stable on the grid")
    alpha_bracket = _bisect(sup_finite, 1.0, q_max)
    lo, hi = _bisect(lambda q: not inf_positive(q), 1.0, q_max)
    beta_bracket = (lo, hi)
    alpha = 0.5 * sum(alpha_bracket)
    beta = 0.5 * sum(beta_bracket)
    if alpha > beta:
        # equal up to grid resolution
        alpha = beta = 0.5 * (alpha + beta)
    return BoydIndices(
        alpha_M=alpha,
        beta_M=beta,
        alpha_bracket=alpha_bracket,
        beta_bracket=beta_bracket,
        grid_spec={"base": base, "refined": fine},
    )


@dataclass(frozen=True)
class RatioBounds:
    p: float
    C_low: float
    C_high: float
    interior_high: float
    holds: bool
    violations: List[str] = field(default_factory=list)
    grid: GridSpec = RATIO_GRID

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "C_low": self.C_low,
            "C_high": self.C_high,
            "interior_high": self.interior_high,
            "holds": self.holds,
            "violations": list(self.violations),
            "grid": self.grid.to_dict(),
        }


def ratio_bounds(M: OrliczFunction, p: float, grid: GridSpec = RATIO_GRID) -> RatioBounds:
    """Grid extrema of M(st) / (M(s) t^p) for s in (0, 1], t in (0, 1).

    Strictness of the upper bound is judged away from the edges s -> 0 and
    t -> 1, where the ratio tends to its supremum.
    """
    s = grid.points()
    t = s[s < 1.0]
    log_s = M.log_eval(s)
    values = M.log_eval(t[:, None] * s[None, :]) - log_s[None, :] - p * np.log(t)[:, None]
    interior = (t[:, None] <= 1.0 - INTERIOR) & (s[None, :] >= INTERIOR)
    low, high = float(values.min()), float(values.max())
    interior_high = float(values[interior].max())

    violations = []
    if not math.isfinite(low):
        violations.append("inf of the ratio is 0 on the grid")
    if not interior_high < -1e-12:
        violations.append(
            f"sup of the ratio is not strictly below 1 (interior log-sup {interior_high:g})"
        )
    return RatioBounds(
        p=p,
        C_low=math.exp(low),
        C_high=math.exp(high),
        interior_high=math.exp(interior_high),
        holds=not violations,
        violations=violations,
        grid=grid,
    )


@dataclass(frozen=True)
class AgeCertificate:
    margin: float
    conclusive: bool
    a: float
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "margin": self.margin,
            "conclusive": self.conclusive,
            "a": self.a,
            "reason": self.reason,
        }


def non_embedding_certificate(
    space: LuxemburgSpace,
    p: float,
    x1: OrliczVector,
    x2: OrliczVector,
    bounds: Optional[RatioBounds] = None,
) -> AgeCertificate:
    """margin = 1 - sum_k M(a |x1(k) + x2(k)|) with a = 2^(-1/p).

    A positive margin rules out x1, x2 as images of the unit vector basis of
    an isometric copy of l_p^2.
    """
    if not disjoint(x1, x2):
        raise InvalidInput("x1 and x2 must be disjoint")
    tol = space.context.tol
    for name, x in (("x1", x1), ("x2", x2)):
        if abs(space.norm(x) - 1.0) > 10 * tol:
            raise InvalidInput(f"||{name}|| must be 1")
    a = 2.0 ** (-1.0 / p)
    margin = 1.0 - space.modular(x1 + x2, 1.0 / a)
    reason = None
    if bounds is not None and not bounds.holds:
        reason = "; ".join(bounds.violations)
    elif margin <= tol:
        reason = f"margin {margin:g} <= tol {tol:g}"
    return AgeCertificate(margin=margin, conclusive=reason is None, a=a, reason=reason)


@dataclass(frozen=True)
class BlockCopy:
    N: int
    lam: float
    distortion: float
    norm: float
    inverse_norm: float
    resolution: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "lambda": self.lam,
            "distortion": self.distortion,
            "norm": self.norm,
            "inverse_norm": self.inverse_norm,
            "resolution": self.resolution,
        }


def block_copy_distortion(M: OrliczFunction, p: float, N: int, resolution: int = 257) -> BlockCopy:
    """Distortion of e_i -> u_i from l_p^2, u_i = lambda 1 on the i-th block of N coordinates.

    lambda solves N M(lambda) = 1. By symmetry only the first quadrant is
    scanned; an odd resolution puts pi/4 on the grid.
    """
    if N < 1:
        raise InvalidParameter(f"Block size must be >= 1, got {N}")
    lam = inverse(M, 1.0 / N)
    source = LuxemburgSpace(make_power(p), 2)
    target = LuxemburgSpace(M, 2 * N)
    matrix = np.zeros((2 * N, 2))
    matrix[:N, 0] = lam
    matrix[N:, 1] = lam
    T = EmbeddingMap(matrix, source, target, {"generator": "block-copy", "N": N})
    theta = np.linspace(0.0, 0.5 * np.pi, resolution)
    ratios = []
    for angle in theta:
        x = OrliczVector([math.cos(angle), math.sin(angle)])
        ratios.append(target.norm(T.apply(x)) / source.norm(x))
    upper, lower = max(ratios), min(ratios)
    return BlockCopy(
        N=N,
        lam=lam,
        distortion=max(upper, 1.0 / lower),
        norm=upper,
        inverse_norm=1.0 / lower,
        resolution=resolution,
    )


def age_experiment(
    M: OrliczFunction,
    p: float,
    block_sizes: Sequence[int] = (10, 100, 1000, 10000),
    pairs: int = 100,
    dim: int = 6,
    seed: int = 0,
) -> Dict[str, Any]:
    """Certificates on the basis pair and random disjoint unit pairs, plus the block-copy sweep."""
    bounds = ratio_bounds(M, p)
    space = LuxemburgSpace(M, dim)
    basis_cert = non_embedding_certificate(space, p, space.basis(0), space.basis(1), bounds)
    rng = rng_for(seed)
    margins = []
    for _ in range(pairs):
        u, v = random_disjoint_unit_pair(space, rng)
        margins.append(non_embedding_certificate(space, p, u, v, bounds).margin)
    copies = [block_copy_distortion(M, p, N) for N in block_sizes]
    return {
        "p": p,
        "ratio_bounds": bounds.to_dict(),
        "basis_certificate": basis_cert.to_dict(),
        "random_pairs": {
            "count": pairs,
            "dim": dim,
            "seed": seed,
            "min_margin": min(margins) if margins else None,
            "max_margin": max(margins) if margins else None,
            "margins": margins,
        },
        "block_copies": [c.to_dict() for c in copies],
    }
