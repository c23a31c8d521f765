"""Explicit constants for approximate preservation of disjointness.

Given good Orlicz functions M1, M2 and eps > 0, ``delta_of_eps`` produces a
``RigidityBudget`` whose delta guarantees: if T is a (1+delta)-embedding of
l_M1^2 into l_M2^n then T e_1, T e_2 are eps-close to disjoint vectors. The
constants are astronomically small, so the chain is carried in mpmath.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import mpmath
import numpy as np

from orlicz_kit.errors import (
    CounterexampleReport,
    DegenerateBudget,
    HypothesisViolation,
    InvalidInput,
    InvalidParameter,
)
from orlicz_kit.geometry import (
    MULTI_INDICES,
    NormCurve,
    NormSurface,
    f_partial,
    n_prime,
    taylor_defect,
)
from orlicz_kit.luxemburg import LuxemburgSpace, OrliczVector, disjoint
from orlicz_kit.orlicz import (
    K_GRID,
    UNIT_GRID,
    GridSpec,
    OrliczFunction,
    check_good,
    k_constant,
    log_delta2_constant,
)
from orlicz_kit.reports import mp_record
from orlicz_kit.samples import random_admissible_pair, rng_for

logger = logging.getLogger(__name__)

DEFAULT_DPS = 50
CERTIFIED = "certified"
EMPIRICAL = "empirical"
MODES = (CERTIFIED, EMPIRICAL)
BUDGET_CHAIN = (
    "C0",
    "C1",
    "C2",
    "C3",
    "C",
    "h_M",
    "h1",
    "alpha0",
    "delta1",
    "delta2",
    "delta",
)


def compute_C0(
    M: OrliczFunction,
    k_grid: GridSpec = K_GRID,
    unit_grid: GridSpec = UNIT_GRID,
    dps: int = DEFAULT_DPS,
):
    """C0 = 3584 K^3 (C(5/4) + C(15)), a uniform bound on |d^beta F|."""
    K = k_constant(M, k_grid)
    with mpmath.workdps(dps):
        c_small = mpmath.exp(log_delta2_constant(M, 1.25, unit_grid, dps=dps))
        c_large = mpmath.exp(log_delta2_constant(M, 15.0, unit_grid, dps=dps))
        return 3584 * mpmath.mpf(K) ** 3 * (c_small + c_large)


def compute_cascade(C0):
    """(C1, C2, C3) bounding |N'|, |N''| and |N'''| in terms of C0."""
    if not C0 > 0:
        raise InvalidParameter(f"C0 must be positive, got {C0}")
    C1 = 2 * C0
    C2 = 2 * C0 * (1 + 2 * C1 + C1**2)
    C3 = 2 * C0 * (1 + 4 * C1 + 3 * C2 + 3 * C1**2 + 2 * C1 * C2 + C1**3)
    return C1, C2, C3


def h_M(M: OrliczFunction, eps, grid: GridSpec = UNIT_GRID, dps: Optional[int] = None):
    """1 / C(5 / (4 eps)), taken as 1 when 5 / (4 eps) <= 1."""
    if not eps > 0:
        raise InvalidParameter(f"h_M needs eps > 0, got {eps}")
    if dps is None:
        scale = 5.0 / (4.0 * float(eps))
        if scale <= 1:
            return 1.0
        return float(np.exp(-log_delta2_constant(M, scale, grid)))
    with mpmath.workdps(dps):
        scale = mpmath.mpf(5) / (4 * mpmath.mpf(eps))
        if scale <= 1:
            return mpmath.mpf(1)
        return mpmath.exp(-log_delta2_constant(M, scale, grid, dps=dps))


@dataclass(frozen=True)
class EmpiricalConstants:
    C0: float
    C3: float
    samples: int
    seed: int
    dim: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "C0": self.C0,
            "C3": self.C3,
            "samples": self.samples,
            "seed": self.seed,
            "dim": self.dim,
        }


def empirical_constants(
    M: OrliczFunction, dim: int = 4, samples: int = 200, seed: int = 0
) -> EmpiricalConstants:
    """Sampled sup of |d^beta F| and of 6 |Taylor defect| / |alpha|^3.

    Experiments only: these are lower estimates of the true suprema.
    """
    space = LuxemburgSpace(M, dim)
    rng = rng_for(seed)
    c0 = 0.0
    c3 = 0.0
    for _ in range(samples):
        f, g = random_admissible_pair(space, rng)
        surface = NormSurface(space, f, g)
        alpha = rng.uniform(-0.49, 0.49)
        eta = rng.uniform(0.13, 1.99)
        c0 = max(c0, max(abs(f_partial(surface, alpha, eta, b)) for b in MULTI_INDICES))
        step = rng.uniform(0.05, 0.45) * rng.choice([-1.0, 1.0])
        c3 = max(c3, 6 * taylor_defect(NormCurve(surface), step) / abs(step) ** 3)
    return EmpiricalConstants(C0=c0, C3=c3, samples=samples, seed=seed, dim=dim)


@dataclass(frozen=True)
class RigidityBudget:
    """The full chain of constants behind delta(eps).

    K and C0..C3 belong to the target function M2; C is the Taylor remainder
    coefficient C3/6 maximized over both functions.
    """

    eps: float
    mode: str
    K: float
    C0: Any
    C1: Any
    C2: Any
    C3: Any
    C: Any
    h_M: Any
    h1: Any
    alpha0: Any
    delta1: Any
    delta2: Any
    delta: Any
    functions: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out = {"eps": self.eps, "mode": self.mode, "K": self.K}
        for name in BUDGET_CHAIN:
            out[name] = mp_record(getattr(self, name))
        out["functions"] = {
            tag: {k: mp_record(v) if k != "K" else v for k, v in consts.items()}
            for tag, consts in self.functions.items()
        }
        out["provenance"] = self.provenance
        return out


def _require_good(M: OrliczFunction, grid: GridSpec):
    report = check_good(M, grid)
    if not report.is_good:
        raise HypothesisViolation(f"{M.family_tag} is not a good Orlicz function", report.violations)


def _function_constants(M, mode, k_grid, unit_grid, dps, empirical_kwargs):
    K = k_constant(M, k_grid)
    if mode == CERTIFIED:
        C0 = compute_C0(M, k_grid, unit_grid, dps)
        with mpmath.workdps(dps):
            C1, C2, C3 = compute_cascade(C0)
        return {"K": K, "C0": C0, "C1": C1, "C2": C2, "C3": C3}, None
    measured = empirical_constants(M, **empirical_kwargs)
    with mpmath.workdps(dps):
        C0 = mpmath.mpf(measured.C0)
        C1, C2, _ = compute_cascade(C0)
        C3 = mpmath.mpf(measured.C3)
    return {"K": K, "C0": C0, "C1": C1, "C2": C2, "C3": C3}, measured


def delta_of_eps(
    M1: OrliczFunction,
    M2: OrliczFunction,
    eps,
    mode: str = CERTIFIED,
    dps: int = DEFAULT_DPS,
    k_grid: GridSpec = K_GRID,
    unit_grid: GridSpec = UNIT_GRID,
    empirical_kwargs: Optional[Dict[str, Any]] = None,
) -> RigidityBudget:
    """delta = min(1/4, delta1, delta2) for embeddings of l_M1^2 into l_M2^n.

    Parameters:
        mode: "certified" uses the grid constants and the cascade;
            "empirical" replaces C0 and C3 with sampled suprema.

    Returns:
        RigidityBudget with every intermediate constant populated.
    """
    if not eps > 0:
        raise InvalidParameter(f"delta_of_eps needs eps > 0, got {eps}")
    if mode not in MODES:
        raise InvalidParameter(f"Unknown mode {mode!r}; expected one of {MODES}")
    empirical_kwargs = empirical_kwargs or {}

    functions = {}
    measured = {}
    for M in (M1, M2):
        if M.family_tag in functions:
            continue
        _require_good(M, k_grid)
        functions[M.family_tag], measured[M.family_tag] = _function_constants(
            M, mode, k_grid, unit_grid, dps, empirical_kwargs
        )
    own = functions[M2.family_tag]

    with mpmath.workdps(dps):
        C = max(consts["C3"] for consts in functions.values()) / 6
        h = h_M(M2, eps, unit_grid, dps=dps)
        h1 = h / (6 * own["C0"])
        alpha0 = h1 / (8 * C)
        x = alpha0**2 * h1 / 4
        if not 0 < alpha0 < mpmath.mpf(1) / 8 or not 0 < x < 1:
            raise DegenerateBudget(
                f"alpha0 = {mpmath.nstr(alpha0, 5)}, alpha0^2 h1 / 4 = {mpmath.nstr(x, 5)}"
            )
        delta1 = x / (1 - x)
        delta2 = (x / 2) / (1 + x / 2)
        delta = min(mpmath.mpf(1) / 4, delta1, delta2)

    provenance = {"K": k_grid.to_dict(), "delta2": unit_grid.to_dict(), "dps": dps}
    if mode == EMPIRICAL:
        provenance["empirical"] = {tag: m.to_dict() for tag, m in measured.items()}
    logger.info("delta(%s) for %s -> %s: %s", eps, M1.family_tag, M2.family_tag, mpmath.nstr(delta, 6))
    return RigidityBudget(
        eps=float(eps),
        mode=mode,
        K=own["K"],
        C0=own["C0"],
        C1=own["C1"],
        C2=own["C2"],
        C3=own["C3"],
        C=C,
        h_M=h,
        h1=h1,
        alpha0=alpha0,
        delta1=delta1,
        delta2=delta2,
        delta=delta,
        functions=functions,
        provenance=provenance,
    )


@dataclass(frozen=True)
class WitnessPair:
    A: np.ndarray
    B: np.ndarray
    f_tilde: OrliczVector
    g_tilde: OrliczVector
    err_f: float
    err_g: float

    @property
    def error(self) -> float:
        return max(self.err_f, self.err_g)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": [int(k) for k in self.A],
            "B": [int(k) for k in self.B],
            "f_tilde": self.f_tilde.to_list(),
            "g_tilde": self.g_tilde.to_list(),
            "err_f": self.err_f,
            "err_g": self.err_g,
        }


def witness_split(space: LuxemburgSpace, f: OrliczVector, g: OrliczVector) -> WitnessPair:
    """Disjoint truncations f 1_A, g 1_B with A = {k : |f(k)| >= |g(k)|}."""
    space._check(f)
    space._check(g)
    in_a = np.abs(f.coords) >= np.abs(g.coords)
    A = np.flatnonzero(in_a)
    B = np.flatnonzero(~in_a)
    f_tilde = f.restrict(A)
    g_tilde = g.restrict(B)
    return WitnessPair(
        A=A,
        B=B,
        f_tilde=f_tilde,
        g_tilde=g_tilde,
        err_f=space.distance(f, f_tilde),
        err_g=space.distance(g, g_tilde),
    )


def second_derivative_at_zero(surface: NormSurface) -> float:
    n0 = surface.space.norm(surface.f)
    return f_partial(surface, 0.0, n0, (2, 0))


def criterion_second_derivative(surface: NormSurface, eps) -> bool:
    """True iff d^2F/dalpha^2 at (0, ||f||) is at least h_M(eps).

    False means (f, g) admits an eps-witness; check it with witness_split.
    """
    return second_derivative_at_zero(surface) >= h_M(surface.M, eps)


@dataclass(frozen=True)
class DiscriminatingCertificate:
    alpha: Any
    lhs: Any
    rhs: Any
    case: int
    slope: float
    dps: int

    @property
    def margin(self):
        return self.lhs - self.rhs

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": mp_record(self.alpha),
            "lhs": mp_record(self.lhs),
            "rhs": mp_record(self.rhs),
            "margin": mp_record(self.margin),
            "case": self.case,
            "slope": self.slope,
            "dps": self.dps,
        }


def discriminating_alpha(
    budget: RigidityBudget,
    space: LuxemburgSpace,
    u: OrliczVector,
    v: OrliczVector,
    f: OrliczVector,
    g: OrliczVector,
) -> DiscriminatingCertificate:
    """Find alpha = +-alpha0 with ||f + alpha g|| > (1 + delta) ||u + alpha v||.

    The sign follows N'_{f,g}(0). Both norms are evaluated at a precision
    fine enough to resolve alpha0^2 h1.
    """
    tol = space.context.tol
    if not disjoint(u, v):
        raise InvalidInput("u and v must be disjoint")
    for name, w in (("u", u), ("v", v)):
        if abs(space.norm(w) - 1.0) > 10 * tol:
            raise InvalidInput(f"||{name}|| must be 1")
    lo, hi = 1.0 / (1.0 + float(budget.delta)), 1.0 + float(budget.delta)
    for name, w in (("f", f), ("g", g)):
        n = space.norm(w)
        if not lo - tol <= n <= hi + tol:
            raise InvalidInput(f"||{name}|| = {n!r} outside [1/(1+delta), 1+delta]")
    pair = witness_split(space, f, g)
    if pair.error <= budget.eps:
        raise HypothesisViolation(
            "(f, g) is eps-close to a disjoint pair; no certificate exists",
            [f"witness errors {pair.err_f:g}, {pair.err_g:g} <= {budget.eps:g}"],
        )

    slope = n_prime(NormCurve(NormSurface(space, f, g)), 0.0)
    with mpmath.workdps(DEFAULT_DPS):
        gap = budget.alpha0**2 * budget.h1 / 4
        dps = max(space.context.dps, int(-mpmath.log10(gap)) + 40)
    with mpmath.workdps(dps):
        alpha = budget.alpha0 if slope >= 0 else -budget.alpha0
        fg = [mpmath.mpf(a) + alpha * mpmath.mpf(b) for a, b in zip(f.coords, g.coords)]
        uv = [mpmath.mpf(a) + alpha * mpmath.mpf(b) for a, b in zip(u.coords, v.coords)]
        lhs = space.norm_mp(fg, dps)
        rhs = (1 + budget.delta) * space.norm_mp(uv, dps)
        certified = lhs > rhs
    certificate = DiscriminatingCertificate(
        alpha=alpha, lhs=lhs, rhs=rhs, case=1 if slope >= 0 else 2, slope=slope, dps=dps
    )
    if not certified:
        raise CounterexampleReport(
            f"alpha = {mpmath.nstr(alpha, 5)} does not separate the norms", certificate.to_dict()
        )
    return certificate
