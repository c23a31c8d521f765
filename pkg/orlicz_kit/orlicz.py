import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import mpmath
import numpy as np
from scipy.optimize import brentq

from orlicz_kit.errors import EvaluationError, InvalidFunction, InvalidParameter
from orlicz_kit.reports import mp_record

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]

MACHINE_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class GridSpec:
    """A log-spaced sampling grid on [lo, hi] (both endpoints included)."""

    lo: float
    hi: float
    count: int = 4096

    def points(self) -> np.ndarray:
        if self.count < 2 or not 0 < self.lo < self.hi:
            raise InvalidParameter(f"Invalid grid: {self}")
        return np.geomspace(self.lo, self.hi, self.count)

    def to_dict(self) -> Dict[str, Any]:
        return {"lo": self.lo, "hi": self.hi, "count": self.count, "spacing": "log"}


# (0, 15] for K, (0, 1] for C(l) and the Boyd ratios.
K_GRID = GridSpec(1e-6, 15.0, 4096)
UNIT_GRID = GridSpec(1e-8, 1.0, 4096)
MP_GRID_COUNT = 64


@dataclass(frozen=True)
class OrliczFunction:
    """An Orlicz function M with derivatives up to order 3.

    All evaluators act on the even extension t -> M(|t|) and accept scalars
    or numpy arrays. ``mp_eval``/``mp_log_eval`` are optional mpmath
    evaluators used by the arbitrary-precision pipelines.
    """

    family: str
    p: Optional[float]
    _eval: ArrayFn = field(repr=False, compare=False)
    _derivs: tuple = field(repr=False, compare=False)
    _log_eval: ArrayFn = field(repr=False, compare=False)
    mp_eval: Optional[Callable[[Any], Any]] = field(
        default=None, repr=False, compare=False
    )
    mp_log_eval: Optional[Callable[[Any], Any]] = field(
        default=None, repr=False, compare=False
    )
    analytic: bool = True

    def __call__(self, t):
        return self._eval(np.abs(np.asarray(t, dtype=float)))

    def derivative(self, order: int, t):
        if order == 0:
            return self(t)
        if order not in (1, 2, 3):
            raise InvalidParameter(f"Derivative order must be 0..3, got {order}")
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._derivs[order - 1](np.abs(np.asarray(t, dtype=float)))

    def deriv1(self, t):
        return self.derivative(1, t)

    def deriv2(self, t):
        return self.derivative(2, t)

    def deriv3(self, t):
        return self.derivative(3, t)

    def log_eval(self, t):
        with np.errstate(divide="ignore"):
            return self._log_eval(np.abs(np.asarray(t, dtype=float)))

    @property
    def family_tag(self) -> str:
        if self.p is None:
            return self.family
        return f"{self.family}:{self.p:g}"

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "p": self.p, "analytic": self.analytic}


def _falling(p: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= p - i
    return out


def make_power(p: float) -> OrliczFunction:
    """M(t) = t^p."""
    p = float(p)
    if not p > 1:
        raise InvalidParameter(f"Power family needs p > 1, got {p}")

    def derivative(k):
        coefficient = _falling(p, k)
        return lambda t: coefficient * np.power(t, p - k)

    return OrliczFunction(
        family="power",
        p=p,
        _eval=lambda t: np.power(t, p),
        _derivs=(derivative(1), derivative(2), derivative(3)),
        _log_eval=lambda t: p * np.log(t),
        mp_eval=lambda t: mpmath.mpf(t) ** p,
        mp_log_eval=lambda t: p * mpmath.log(t),
    )


def make_exp_weighted(p: float) -> OrliczFunction:
    """M(t) = t^p e^(t-1), normalized so that M(1) = 1."""
    p = float(p)
    if not p > 3:
        raise InvalidParameter(f"Exp-weighted family needs p > 3, got {p}")

    def derivative(k):
        # Leibniz: M^(k) = e^(t-1) * sum_j C(k, j) (p)_j t^(p-j)
        terms = [(math.comb(k, j) * _falling(p, j), p - j) for j in range(k + 1)]

        def evaluate(t):
            total = sum(c * np.power(t, e) for c, e in terms)
            return np.exp(t - 1.0) * total

        return evaluate

    return OrliczFunction(
        family="exp_weighted",
        p=p,
        _eval=lambda t: np.power(t, p) * np.exp(t - 1.0),
        _derivs=(derivative(1), derivative(2), derivative(3)),
        _log_eval=lambda t: p * np.log(t) + t - 1.0,
        mp_eval=lambda t: mpmath.mpf(t) ** p * mpmath.exp(mpmath.mpf(t) - 1),
        mp_log_eval=lambda t: p * mpmath.log(t) + t - 1,
    )


def _central_first(fn: ArrayFn) -> ArrayFn:
    def evaluate(t):
        h = MACHINE_EPS ** (1 / 3) * np.maximum(t, 1e-12)
        return (fn(np.abs(t + h)) - fn(np.abs(t - h))) / (2 * h)

    return evaluate


def _central_second(fn: ArrayFn) -> ArrayFn:
    def evaluate(t):
        h = MACHINE_EPS ** (1 / 4) * np.maximum(t, 1e-12)
        return (fn(np.abs(t + h)) - 2 * fn(t) + fn(np.abs(t - h))) / h**2

    return evaluate


def _central_third(fn: ArrayFn) -> ArrayFn:
    def evaluate(t):
        h = MACHINE_EPS ** (1 / 5) * np.maximum(t, 1e-12)
        return (
            fn(np.abs(t + 2 * h))
            - 2 * fn(np.abs(t + h))
            + 2 * fn(np.abs(t - h))
            - fn(np.abs(t - 2 * h))
        ) / (2 * h**3)

    return evaluate


def make_custom(
    eval_fn: ArrayFn,
    deriv1: Optional[ArrayFn] = None,
    deriv2: Optional[ArrayFn] = None,
    deriv3: Optional[ArrayFn] = None,
    name: str = "custom",
    mp_eval: Optional[Callable[[Any], Any]] = None,
) -> OrliczFunction:
    """Wrap a user-supplied closed form; missing derivatives fall back to
    central differences."""

    def wrapped(t):
        return np.asarray(eval_fn(t), dtype=float)

    analytic = all(d is not None for d in (deriv1, deriv2, deriv3))
    derivs = (
        deriv1 or _central_first(wrapped),
        deriv2 or _central_second(wrapped),
        deriv3 or _central_third(wrapped),
    )
    mp_log_eval = None
    if mp_eval is not None:
        mp_log_eval = lambda t: mpmath.log(mp_eval(t))  # noqa: E731
    return OrliczFunction(
        family=name,
        p=None,
        _eval=wrapped,
        _derivs=derivs,
        _log_eval=lambda t: np.log(wrapped(t)),
        mp_eval=mp_eval,
        mp_log_eval=mp_log_eval,
        analytic=analytic,
    )


def from_config(config: Dict[str, Any]) -> OrliczFunction:
    """Build an Orlicz function from ``{"family": ..., "p": ...}``."""
    family = config.get("family")
    if "p" not in config:
        raise InvalidParameter("Orlicz config needs a 'p' entry")
    p = float(config["p"])
    if family == "power":
        return make_power(p)
    if family == "exp_weighted":
        return make_exp_weighted(p)
    raise InvalidParameter(f"Unknown Orlicz family: {family!r}")


def inverse(M: OrliczFunction, y: float) -> float:
    """Return t >= 0 with M(t) = y."""
    if y < 0:
        raise InvalidParameter(f"M^-1 needs y >= 0, got {y}")
    if y == 0:
        return 0.0
    hi = 1.0
    while float(M(hi)) < y:
        hi *= 2.0
        if hi > 1e300:
            raise InvalidFunction(f"M never reaches {y}")
    return brentq(lambda t: float(M(t)) - y, 0.0, hi, xtol=1e-300, rtol=4 * MACHINE_EPS)


def _check_finite(values: np.ndarray, t: np.ndarray, label: str):
    bad = ~np.isfinite(values)
    if bad.any():
        point = float(np.broadcast_to(t, values.shape)[bad][0])
        raise EvaluationError(f"{label} is not finite at t={point:g}", point=point)


def _delta2pp_ratios(M: OrliczFunction, t: np.ndarray) -> List[np.ndarray]:
    values = [M.derivative(order, t) for order in range(4)]
    for order, v in enumerate(values):
        _check_finite(v, t, f"M^({order})")
    with np.errstate(divide="ignore", invalid="ignore"):
        return [t * values[i] / values[i - 1] for i in (1, 2, 3)]


@dataclass
class GoodnessReport:
    is_good: bool
    violations: List[str]
    K: float
    ratio_sups: List[float]
    grid: GridSpec

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_good": self.is_good,
            "violations": list(self.violations),
            "K": self.K,
            "ratio_sups": list(self.ratio_sups),
            "grid": self.grid.to_dict(),
        }


def check_good(M: OrliczFunction, grid: GridSpec = K_GRID) -> GoodnessReport:
    """Check the hypotheses of the disjointness theorem on a grid.

    Verifies positivity of M..M''', convexity, monotonicity of M''', the
    o(t^3) behaviour on the smallest decade and the Delta_2++ ratios, and
    returns the empirical sup of t M^(i) / M^(i-1) as the candidate K.
    """
    if grid.count < 1000 or grid.hi < 15.0:
        raise InvalidParameter("check_good needs >= 1000 points covering (0, 15]")
    t = grid.points()
    values = [M.derivative(order, t) for order in range(4)]
    for order, v in enumerate(values):
        _check_finite(v, t, f"M^({order})")

    violations: List[str] = []
    if float(M(0.0)) != 0.0:
        violations.append(f"M(0) = {float(M(0.0)):g}, expected 0")
    for order, v in enumerate(values):
        bad = v <= 0
        if bad.any():
            violations.append(f"M^({order}) is not positive at t={t[bad][0]:g}")
    if np.any(np.diff(values[0]) < 0):
        violations.append("M is not nondecreasing on the grid")
    slopes = np.diff(values[0]) / np.diff(t)
    if np.any(np.diff(slopes) < -1e-9 * np.abs(slopes[1:])):
        violations.append("M is not convex on the grid")
    if np.any(np.diff(values[3]) <= 0):
        violations.append("M''' is not increasing on the grid")

    decade = t <= t[0] * 10
    with np.errstate(divide="ignore", invalid="ignore"):
        cubic_ratio = values[0][decade] / t[decade] ** 3
    if not np.all(np.diff(cubic_ratio) > 0):
        violations.append("M(t)/t^3 does not decrease to 0 near 0 (M(t) = o(t^3) fails)")

    ratios = _delta2pp_ratios(M, t)
    sups = []
    for i, ratio in enumerate(ratios, start=1):
        if not np.all(np.isfinite(ratio)):
            violations.append(f"t M^({i})/M^({i - 1}) is not finite on the grid")
            sups.append(float("inf"))
            continue
        sups.append(float(ratio.max()))
        near_zero = ratio[decade]
        if near_zero.max() > 1.01 * near_zero.min():
            violations.append(
                f"t M^({i})/M^({i - 1}) is not stable near 0 (Delta_2++ fails)"
            )
    K = max(sups)
    if not K > 1:
        violations.append(f"K = {K:g} does not exceed 1")
    return GoodnessReport(
        is_good=not violations, violations=violations, K=K, ratio_sups=sups, grid=grid
    )


def k_constant(M: OrliczFunction, grid: GridSpec = K_GRID) -> float:
    """Empirical sup over (0, 15] of t M^(i)(t) / M^(i-1)(t), i = 1, 2, 3."""
    return max(float(np.max(r)) for r in _delta2pp_ratios(M, grid.points()))


def log_delta2_constant(
    M: OrliczFunction, l, grid: GridSpec = UNIT_GRID, dps: Optional[int] = None
):
    """log C(l) with C(l) = sup_{x in (0,1]} M(lx) / M(x).

    With ``dps`` and an mpmath evaluator the scan runs in arbitrary precision
    and returns an ``mpf``; otherwise a float.
    """
    if not l > 1:
        raise InvalidParameter(f"C(l) needs l > 1, got {l}")
    x = grid.points()
    if dps is not None and M.mp_log_eval is not None:
        with mpmath.workdps(dps):
            scale = mpmath.mpf(l)
            return max(
                M.mp_log_eval(scale * mpmath.mpf(xi)) - M.mp_log_eval(mpmath.mpf(xi))
                for xi in x
            )
    with np.errstate(over="ignore"):
        ratio = M.log_eval(float(l) * x) - M.log_eval(x)
    _check_finite(ratio, x, "log M(lx) - log M(x)")
    return float(ratio.max())


def delta2_constant(M: OrliczFunction, l: float, grid: GridSpec = UNIT_GRID) -> float:
    """C(l) = sup over the grid of M(lx)/M(x); may overflow to inf for huge l."""
    with np.errstate(over="ignore"):
        return float(np.exp(log_delta2_constant(M, l, grid)))


@dataclass(frozen=True)
class SubmultResult:
    eps: float
    alpha: Any
    log_alpha: Any
    holds: bool
    grid: GridSpec
    precision: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eps": float(self.eps),
            "alpha": mp_record(self.alpha),
            "log_alpha": mp_record(self.log_alpha),
            "holds": self.holds,
            "grid": self.grid.to_dict(),
            "precision": self.precision,
        }


def submult_constant(
    M: OrliczFunction,
    eps: float,
    grid: Optional[GridSpec] = None,
    dps: Optional[int] = None,
) -> SubmultResult:
    """alpha(eps) = inf over (0, 1-eps]^2 of M(tu) / (M(t) M(u)).

    A result with ``holds = False`` is the hypothesis-violation report; it is
    never raised. The arbitrary-precision scan (``dps``) is what the basis
    pipeline uses, since alpha(h) - 1 is far below double resolution there.
    """
    if not 0 < eps < 1:
        raise InvalidParameter(f"submult_constant needs eps in (0, 1), got {eps}")
    if abs(float(M(1.0)) - 1.0) > 1e-12:
        raise InvalidFunction("submult_constant needs M(1) = 1")
    top = 1.0 - float(eps)
    lo = 1e-6 if grid is None else grid.lo
    if dps is not None and M.mp_log_eval is not None:
        count = MP_GRID_COUNT if grid is None else grid.count
        spec = GridSpec(min(lo, top / 2), top, count)
        with mpmath.workdps(dps):
            one = mpmath.mpf(1)
            pts = [mpmath.mpf(v) for v in spec.points()[:-1]] + [one - mpmath.mpf(eps)]
            logs = [M.mp_log_eval(v) for v in pts]
            best = min(
                M.mp_log_eval(a * b) - la - lb
                for a, la in zip(pts, logs)
                for b, lb in zip(pts, logs)
            )
            tol = mpmath.mpf(10) ** (-(dps - 10))
            holds = bool(best > tol)
            alpha = mpmath.exp(best)
        result = SubmultResult(eps, alpha, best, holds, spec, dps)
    else:
        count = 4096 if grid is None else grid.count
        spec = GridSpec(min(lo, top / 2), top, count)
        pts = spec.points()
        logs = M.log_eval(pts)
        best = np.inf
        for rows in np.array_split(np.arange(pts.size), max(1, pts.size // 256)):
            values = M.log_eval(pts[rows, None] * pts[None, :])
            values = values - logs[rows, None] - logs[None, :]
            best = min(best, float(values.min()))
        holds = best > 1e-12
        result = SubmultResult(eps, math.exp(best), best, holds, spec, None)
    if not result.holds:
        logger.warning(
            "submultiplicativity alpha(%s) = %s does not exceed 1",
            eps,
            mpmath.nstr(result.alpha, 17),
        )
    return result


@dataclass(frozen=True)
class GrowthConstants:
    K: float
    delta2: Callable[[float], float]
    submult: Callable[[float], SubmultResult]
    grid_spec: Dict[str, GridSpec]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "C(5/4)": self.delta2(1.25),
            "C(15)": self.delta2(15.0),
            "grid_spec": {k: v.to_dict() for k, v in self.grid_spec.items()},
        }


def growth_constants(
    M: OrliczFunction, k_grid: GridSpec = K_GRID, unit_grid: GridSpec = UNIT_GRID
) -> GrowthConstants:
    return GrowthConstants(
        K=k_constant(M, k_grid),
        delta2=lambda l: delta2_constant(M, l, unit_grid),
        submult=lambda eps: submult_constant(M, eps),
        grid_spec={"K": k_grid, "delta2": unit_grid},
    )
