import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from orlicz_kit.errors import DomainError, InvalidInput, InvalidParameter, NumericalDegeneracy
from orlicz_kit.luxemburg import LuxemburgSpace, OrliczVector

logger = logging.getLogger(__name__)

NORM_BAND = (0.8, 1.25)
ALPHA_DOMAIN = (-0.5, 0.5)
ETA_DOMAIN = (0.125, 2.0)

MULTI_INDICES = [(i, j) for i in range(4) for j in range(4) if i + j <= 3]


@dataclass(frozen=True)
class NormSurface:
    """F(alpha, eta) = sum_k M(|f(k) + alpha g(k)| / eta) - 1 for a pair f, g."""

    space: LuxemburgSpace
    f: OrliczVector
    g: OrliczVector

    def __post_init__(self):
        lo, hi = NORM_BAND
        slack = self.space.context.tol
        for name, v in (("f", self.f), ("g", self.g)):
            n = self.space.norm(v)
            if not lo - slack <= n <= hi + slack:
                raise InvalidInput(f"||{name}|| = {n:g} outside the band [4/5, 5/4]")

    @property
    def M(self):
        return self.space.M


@dataclass(frozen=True)
class NormCurve:
    """N(alpha) = ||f + alpha g|| on alpha in (-1/2, 1/2)."""

    surface: NormSurface


def _product(weight: np.ndarray, values: np.ndarray) -> np.ndarray:
    # 0 * inf counts as 0: a vanishing coefficient kills the term
    with np.errstate(invalid="ignore"):
        return np.where(weight == 0, 0.0, weight * values)


def _check_alpha(alpha: float):
    lo, hi = ALPHA_DOMAIN
    if not lo < alpha < hi:
        raise DomainError(f"alpha = {alpha:g} outside (-1/2, 1/2)")


def f_partial(surface: NormSurface, alpha: float, eta: float, beta: Tuple[int, int]) -> float:
    """d^beta F at (alpha, eta), beta = (order in alpha, order in eta), |beta| <= 3.

    Uses sgn(0) = 0; the series of the infinite-dimensional case is a finite sum.
    """
    beta = tuple(int(b) for b in beta)
    if beta not in MULTI_INDICES:
        raise InvalidParameter(f"Multi-index {beta} must be nonnegative with |beta| <= 3")
    _check_alpha(alpha)
    if not ETA_DOMAIN[0] < eta < ETA_DOMAIN[1]:
        raise DomainError(f"eta = {eta:g} outside (1/8, 2)")

    M = surface.M
    f, g = surface.f.coords, surface.g.coords
    y = f + alpha * g
    s = np.sign(y)
    ay = np.abs(y)
    a = ay / eta
    d1, d2, d3 = M.deriv1(a), M.deriv2(a), M.deriv3(a)

    if beta == (0, 0):
        return float(np.sum(M(a))) - 1.0
    if beta == (1, 0):
        terms = _product(g * s / eta, d1)
    elif beta == (0, 1):
        terms = _product(-ay / eta**2, d1)
    elif beta == (2, 0):
        terms = _product(g**2 / eta**2, d2)
    elif beta == (1, 1):
        terms = _product(-g * s / eta**2, d1) + _product(-g * y / eta**3, d2)
    elif beta == (0, 2):
        terms = _product(2 * ay / eta**3, d1) + _product(ay**2 / eta**4, d2)
    elif beta == (3, 0):
        terms = _product(g**3 * s / eta**3, d3)
    elif beta == (2, 1):
        terms = _product(-2 * g**2 / eta**3, d2) + _product(-(g**2) * ay / eta**4, d3)
    elif beta == (1, 2):
        terms = (
            _product(2 * g * s / eta**3, d1)
            + _product(4 * g * y / eta**4, d2)
            + _product(g * ay**2 * s / eta**5, d3)
        )
    else:
        terms = (
            _product(-6 * ay / eta**4, d1)
            + _product(-6 * ay**2 / eta**5, d2)
            + _product(-(ay**3) / eta**6, d3)
        )
    return float(np.sum(terms))


def n_value(curve: NormCurve, alpha: float) -> float:
    _check_alpha(alpha)
    s = curve.surface
    return s.space.norm(s.f + alpha * s.g)


def _eta_slope(surface: NormSurface, alpha: float, eta: float) -> float:
    slope = f_partial(surface, alpha, eta, (0, 1))
    if abs(slope) <= 0.5:
        raise NumericalDegeneracy(
            f"|dF/deta| = {abs(slope):g} <= 1/2 at alpha={alpha:g}, eta={eta:g}"
        )
    return slope


def n_prime(curve: NormCurve, alpha: float) -> float:
    """N'(alpha) = -F_alpha / F_eta on the curve."""
    surface = curve.surface
    eta = n_value(curve, alpha)
    slope = _eta_slope(surface, alpha, eta)
    return -f_partial(surface, alpha, eta, (1, 0)) / slope


def n_second(curve: NormCurve, alpha: float) -> float:
    """Solve F_aa + 2 N' F_ae + N'^2 F_ee + N'' F_e = 0 for N''."""
    surface = curve.surface
    eta = n_value(curve, alpha)
    slope = _eta_slope(surface, alpha, eta)
    first = -f_partial(surface, alpha, eta, (1, 0)) / slope
    total = (
        f_partial(surface, alpha, eta, (2, 0))
        + 2 * first * f_partial(surface, alpha, eta, (1, 1))
        + first**2 * f_partial(surface, alpha, eta, (0, 2))
    )
    return -total / slope


def taylor_defect(curve: NormCurve, alpha: float) -> float:
    """|N(alpha) - N(0) - alpha N'(0) - alpha^2/2 N''(0)|."""
    _check_alpha(alpha)
    if alpha == 0:
        return 0.0
    n0 = n_value(curve, 0.0)
    return abs(
        n_value(curve, alpha)
        - n0
        - alpha * n_prime(curve, 0.0)
        - 0.5 * alpha**2 * n_second(curve, 0.0)
    )
