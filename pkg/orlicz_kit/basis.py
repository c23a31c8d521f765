"""Constants for approximate preservation of the canonical basis.

Under submultiplicativity (alpha(eps) > 1), images of basis vectors under a
(1+delta)-embedding of l_M^k into l_M^n lie within eps of signed basis
vectors. ``basis_delta_of_eps`` computes the threshold h, the constant r,
eps' and delta; ``extract_basis_witnesses`` recovers the signed indices.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.optimize import brentq

from orlicz_kit.disjointness import DEFAULT_DPS, RigidityBudget, delta_of_eps, witness_split
from orlicz_kit.errors import (
    DegenerateBudget,
    DistinctnessViolation,
    HypothesisViolation,
    InvalidFunction,
    InvalidInput,
    InvalidParameter,
)
from orlicz_kit.luxemburg import LuxemburgSpace, OrliczVector
from orlicz_kit.orlicz import (
    K_GRID,
    UNIT_GRID,
    GridSpec,
    OrliczFunction,
    SubmultResult,
    check_good,
    log_delta2_constant,
    submult_constant,
)
from orlicz_kit.reports import mp_record

logger = logging.getLogger(__name__)

# final deltas are shrunk by this factor to stay strictly inside the bounds
SAFETY = mpmath.mpf("1e-6")


def compute_r(M: OrliczFunction) -> float:
    """r > 1 with M(1/r) = 1/2."""
    top = float(M(1.0))
    if not top > 0.5:
        raise InvalidFunction(f"M(1) = {top:g}; M(1/r) = 1/2 has no root with r > 1")
    t = brentq(lambda s: float(M(s)) - 0.5, 0.0, 1.0, xtol=1e-300)
    return 1.0 / t


# below this target the double-precision phi loses its leading digits
MP_TARGET = 1e-6


def _mp_phi_root(M: OrliczFunction, log_target: float) -> float:
    """Root of phi(t) = target in arbitrary precision, by halving then bisection."""
    dps = int(-log_target / math.log(10)) + 30
    with mpmath.workdps(dps):
        target = mpmath.exp(log_target)

        def phi(t):
            return M.mp_eval(t) + 1 - M.mp_eval(1 - t) - target

        hi = mpmath.mpf(1)
        while phi(hi / 2) > 0:
            hi /= 2
        lo = hi / 2
        for _ in range(64):
            mid = (lo + hi) / 2
            if phi(mid) > 0:
                hi = mid
            else:
                lo = mid
        return float(lo)


def compute_h(
    M: OrliczFunction, eps: float, grid: GridSpec = UNIT_GRID, r: Optional[float] = None
) -> float:
    """Snap threshold h(eps).

    phi(t) = M(t) + 1 - M(1 - t) increases from 0; h is taken just below the
    root of phi(h) = 1 / C(1/eps), so phi < 1 / C(1/eps) on [0, h). With ``r``
    the result is clamped to 1 - 1/r.
    """
    if not 0 < eps < 1:
        raise InvalidParameter(f"compute_h needs eps in (0, 1), got {eps}")
    log_target = -log_delta2_constant(M, 1.0 / eps, grid)
    if log_target < math.log(MP_TARGET) and M.mp_eval is not None:
        root = _mp_phi_root(M, log_target)
    else:
        target = math.exp(log_target)

        def phi(t):
            return float(M(t)) + 1.0 - float(M(1.0 - t)) - target

        root = brentq(phi, 0.0, 1.0, xtol=1e-300)
    h = root * (1.0 - 1e-9)
    if r is not None:
        h = min(h, 1.0 - 1.0 / r)
    return h


def snap_to_basis(
    space: LuxemburgSpace, x: OrliczVector, h: float
) -> Optional[Tuple[int, float]]:
    """First index i with |x(i)| > 1 - h, with the sign of x(i); None if none qualifies."""
    n = space.norm(x)
    if n > 1.0 + space.context.tol:
        raise InvalidInput(f"snap_to_basis needs ||x|| <= 1, got {n!r}")
    # 1 - |x(i)| < h stays exact when 1 - h rounds to 1
    hits = np.flatnonzero(1.0 - np.abs(x.coords) < h)
    if hits.size == 0:
        return None
    if hits.size > 1:
        logger.warning("%d coordinates exceed 1 - h = %g; using the first", hits.size, 1 - h)
    index = int(hits[0])
    return index, float(np.sign(x.coords[index]))


@dataclass(frozen=True)
class BasisBudget:
    eps: float
    r: float
    h: float
    h_raw: float
    alpha: SubmultResult
    eps_prime: Any
    delta_lemma: Any
    delta: Any
    lemma_budget: RigidityBudget
    stages: Dict[str, Any] = field(default_factory=dict)

    @property
    def alpha_fun(self):
        return self.alpha.alpha

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "r": self.r,
            "h": self.h,
            "h_raw": self.h_raw,
            "alpha": self.alpha.to_dict(),
            "eps_prime": mp_record(self.eps_prime),
            "delta_lemma": mp_record(self.delta_lemma),
            "delta": mp_record(self.delta),
            "lemma_budget": self.lemma_budget.to_dict(),
            "stages": self.stages,
        }


def _largest_eps_prime(M: OrliczFunction, eps, threshold, dps: int):
    """Largest e <= eps with M(1/(1+2e)) > threshold, by geometric bisection."""
    with mpmath.workdps(dps):

        def feasible(e):
            return M.mp_eval(1 / (1 + 2 * e)) > threshold

        hi = mpmath.mpf(eps)
        if feasible(hi):
            return hi
        lo = hi / 2
        while not feasible(lo):
            hi, lo = lo, lo / 2
            if lo < mpmath.mpf(10) ** (-dps):
                raise DegenerateBudget("No eps' satisfies M(1/(1+2eps')) > 2/(1+alpha)")
        while hi / lo - 1 > mpmath.mpf("1e-10"):
            mid = mpmath.sqrt(lo * hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        return lo


def lemma_delta_of_eps(M: OrliczFunction, eps, dps: int = DEFAULT_DPS, **grids):
    """delta < eps/6 such that disjointness holds with error eps/6.

    Single-level stage: it inherits the caller's h and eps' and never solves a
    nested threshold M(1/(1+2e)) > 1/alpha(h(e/2)) of its own, whose h would
    need far more digits than any working precision.

    Returns (delta, the disjointness budget it was derived from).
    """
    with mpmath.workdps(dps):
        sixth = mpmath.mpf(eps) / 6
    budget = delta_of_eps(M, M, sixth, dps=dps, **grids)
    with mpmath.workdps(dps):
        delta = min(budget.delta, sixth) * (1 - SAFETY)
    return delta, budget


def basis_delta_of_eps(
    M: OrliczFunction,
    eps: float,
    dps: int = DEFAULT_DPS,
    k_grid: GridSpec = K_GRID,
    unit_grid: GridSpec = UNIT_GRID,
) -> BasisBudget:
    """delta such that (1+delta)-embeddings of l_M^k send e_i eps-close to +-e_j."""
    if not 0 < eps < 1:
        raise InvalidParameter(f"basis_delta_of_eps needs eps in (0, 1), got {eps}")
    report = check_good(M, k_grid)
    if not report.is_good:
        raise HypothesisViolation(f"{M.family_tag} is not a good Orlicz function", report.violations)
    if M.mp_eval is None:
        raise InvalidFunction(f"{M.family_tag} has no arbitrary-precision form")

    r = compute_r(M)
    h_raw = compute_h(M, eps / 2, unit_grid)
    h = min(h_raw, 1.0 - 1.0 / r)
    if not h > 0:
        raise DegenerateBudget(f"Snap threshold h({eps / 2:g}) underflows")
    # alpha(h) - 1 and the eps' thresholds are of order h^2
    dps = max(dps, int(-2 * math.log10(h)) + 30)
    alpha = submult_constant(M, h, dps=dps)
    if not alpha.holds:
        raise HypothesisViolation(
            f"alpha(h) <= 1 for {M.family_tag}; the basis is not rigid",
            [f"alpha({h:g}) = {mpmath.nstr(alpha.alpha, 17)}"],
        )

    with mpmath.workdps(dps):
        lemma_threshold = 1 / alpha.alpha
        theorem_threshold = 2 / (1 + alpha.alpha)
        e_star = _largest_eps_prime(M, eps, max(lemma_threshold, theorem_threshold), dps)
        eps_prime = e_star / 2
    delta_lemma, lemma_budget = lemma_delta_of_eps(
        M, eps_prime / 2, dps=dps, k_grid=k_grid, unit_grid=unit_grid
    )
    with mpmath.workdps(dps):
        delta = min(delta_lemma, eps_prime) * (1 - SAFETY)
        stages = {
            "lemma": {
                "eps": mp_record(eps_prime / 2),
                "disjointness_eps": mp_record(eps_prime / 12),
                "delta": mp_record(delta_lemma),
            },
            "theorem": {"eps": eps, "delta": mp_record(delta)},
            "thresholds": {
                "lemma": mp_record(lemma_threshold),
                "theorem": mp_record(theorem_threshold),
            },
            "grids": {"K": k_grid.to_dict(), "delta2": unit_grid.to_dict(), "dps": dps},
        }
    logger.info("basis delta(%s) for %s: %s", eps, M.family_tag, mpmath.nstr(delta, 6))
    return BasisBudget(
        eps=float(eps),
        r=r,
        h=h,
        h_raw=h_raw,
        alpha=alpha,
        eps_prime=eps_prime,
        delta_lemma=delta_lemma,
        delta=delta,
        lemma_budget=lemma_budget,
        stages=stages,
    )


def lemma_contradiction_modular(
    space: LuxemburgSpace,
    f1: OrliczVector,
    g1: OrliczVector,
    budget: BasisBudget,
) -> float:
    """Modular of (f1 - g1) / (eps' + (1+delta) r).

    For disjoint unit f1, g1 with every |coordinate| <= 1 - h this exceeds 1,
    so ||f1 - g1|| > eps' + (1+delta) r.
    """
    scale = float(budget.eps_prime) + (1.0 + float(budget.delta)) * budget.r
    return space.modular(f1 - g1, scale)


@dataclass(frozen=True)
class BasisWitness:
    index: int
    sign: float
    error: float
    route: str

    def to_dict(self) -> Dict[str, Any]:
        return {"index": self.index, "sign": self.sign, "error": self.error, "route": self.route}


def _snap_normalized(space, x, h):
    if x.is_zero():
        return None
    return snap_to_basis(space, space.normalize(x), h)


def extract_basis_witnesses(
    budget: BasisBudget, space: LuxemburgSpace, images: Sequence[OrliczVector]
) -> List[BasisWitness]:
    """Signed basis vectors theta e_i close to each image T(e_k).

    Each image is normalized and snapped; failing that, it is split against
    the other images and the truncation is snapped. Indices must be distinct.
    """
    witnesses: List[BasisWitness] = []
    for k, image in enumerate(images):
        if image.is_zero():
            raise InvalidInput(f"Image {k} is zero")
        route = "direct"
        hit = _snap_normalized(space, image, budget.h)
        if hit is None:
            route = "split"
            for j, other in enumerate(images):
                if j == k:
                    continue
                hit = _snap_normalized(space, witness_split(space, image, other).f_tilde, budget.h)
                if hit is not None:
                    break
        if hit is None:
            route = "argmax"
            index = int(np.argmax(np.abs(image.coords)))
            hit = (index, float(np.sign(image.coords[index])))
            logger.warning("Image %d does not snap; falling back to its largest coordinate", k)
        index, sign = hit
        error = space.distance(image, space.basis(index, sign))
        witnesses.append(BasisWitness(index=index, sign=sign, error=error, route=route))

    seen: Dict[int, int] = {}
    for k, w in enumerate(witnesses):
        if w.index in seen:
            raise DistinctnessViolation(
                f"Images {seen[w.index]} and {k} both snap to basis index {w.index}"
            )
        seen[w.index] = k
    return witnesses
