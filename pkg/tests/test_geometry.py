import numpy as np
import pytest

from orlicz_kit.errors import DomainError, InvalidInput, InvalidParameter
from orlicz_kit.geometry import (
    MULTI_INDICES,
    NormCurve,
    NormSurface,
    f_partial,
    n_prime,
    n_second,
    n_value,
    taylor_defect,
)
from orlicz_kit.luxemburg import LuxemburgSpace
from orlicz_kit.orlicz import make_exp_weighted, make_power
from orlicz_kit.samples import random_admissible_pair, rng_for


@pytest.fixture(scope="module")
def space():
    return LuxemburgSpace(make_exp_weighted(4.0), 5)


@pytest.fixture(scope="module")
def surfaces(space):
    rng = rng_for(11)
    return [NormSurface(space, *random_admissible_pair(space, rng)) for _ in range(4)]


def _lower(beta):
    """The multi-index one step below beta, and the variable it steps in."""
    if beta[0] > 0:
        return (beta[0] - 1, beta[1]), 0
    return (beta[0], beta[1] - 1), 1


@pytest.mark.parametrize("beta", [b for b in MULTI_INDICES if b != (0, 0)])
def test_partials_match_finite_differences(surfaces, beta):
    lower, axis = _lower(beta)
    step = 1e-5
    alpha, eta = 0.1, 0.9
    for surface in surfaces:
        if axis == 0:
            hi = f_partial(surface, alpha + step, eta, lower)
            lo = f_partial(surface, alpha - step, eta, lower)
        else:
            hi = f_partial(surface, alpha, eta + step, lower)
            lo = f_partial(surface, alpha, eta - step, lower)
        expected = (hi - lo) / (2 * step)
        assert f_partial(surface, alpha, eta, beta) == pytest.approx(expected, rel=1e-5, abs=1e-6)


def test_value_vanishes_on_the_curve(surfaces):
    for surface in surfaces:
        curve = NormCurve(surface)
        for alpha in (-0.3, 0.0, 0.2):
            eta = n_value(curve, alpha)
            assert f_partial(surface, alpha, eta, (0, 0)) == pytest.approx(0.0, abs=1e-9)


def test_curve_derivatives_match_finite_differences(surfaces):
    for surface in surfaces:
        curve = NormCurve(surface)
        for alpha in (-0.4, -0.1, 0.0, 0.25, 0.4):
            h = 1e-4
            slope = (n_value(curve, alpha + h * 0.5) - n_value(curve, alpha - h * 0.5)) / h
            assert n_prime(curve, alpha) == pytest.approx(slope, abs=1e-6)

            h = 1e-3
            curvature = (
                n_value(curve, alpha + h) - 2 * n_value(curve, alpha) + n_value(curve, alpha - h)
            ) / h**2
            assert n_second(curve, alpha) == pytest.approx(curvature, rel=1e-4, abs=1e-4)


def test_taylor_defect_is_cubic():
    space = LuxemburgSpace(make_exp_weighted(4.0), 3)
    f = space.normalize(space.vector([1.0, 0.5, 0.2]))
    g = space.normalize(space.vector([0.3, -0.8, 0.6]))
    curve = NormCurve(NormSurface(space, f, g))
    assert taylor_defect(curve, 0.0) == 0.0
    ratio = taylor_defect(curve, 0.04) / taylor_defect(curve, 0.02)
    assert 6.0 < ratio < 10.0


def test_power_curve_of_basis_pair():
    # ||e_0 + alpha e_1||_2 = sqrt(1 + alpha^2)
    space = LuxemburgSpace(make_power(2.0), 2)
    curve = NormCurve(NormSurface(space, space.basis(0), space.basis(1)))
    assert n_value(curve, 0.3) == pytest.approx(np.sqrt(1.09), rel=1e-10)
    assert n_prime(curve, 0.3) == pytest.approx(0.3 / np.sqrt(1.09), rel=1e-8)
    assert n_second(curve, 0.0) == pytest.approx(1.0, rel=1e-8)


def test_zero_coordinates_do_not_contribute(space):
    surface = NormSurface(space, space.basis(0), space.basis(1))
    assert f_partial(surface, 0.0, 1.0, (1, 0)) == 0.0
    assert f_partial(surface, 0.0, 1.0, (2, 0)) == 0.0


def test_domain_and_band(space, surfaces):
    surface = surfaces[0]
    with pytest.raises(DomainError):
        f_partial(surface, 0.5, 1.0, (1, 0))
    with pytest.raises(DomainError):
        f_partial(surface, 0.0, 2.0, (1, 0))
    with pytest.raises(DomainError):
        n_value(NormCurve(surface), -0.5)
    with pytest.raises(InvalidParameter):
        f_partial(surface, 0.0, 1.0, (2, 2))
    with pytest.raises(InvalidParameter):
        f_partial(surface, 0.0, 1.0, (-1, 1))
    with pytest.raises(InvalidInput):
        NormSurface(space, 2.0 * space.basis(0), space.basis(1))


def test_curve_is_convex_on_alpha_ladders(space, surfaces):
    rng = rng_for(23)
    pairs = surfaces + [NormSurface(space, *random_admissible_pair(space, rng)) for _ in range(16)]
    ladder = np.linspace(-0.45, 0.45, 19)
    for surface in pairs:
        curve = NormCurve(surface)
        values = np.array([n_value(curve, alpha) for alpha in ladder])
        second = values[:-2] - 2 * values[1:-1] + values[2:]
        assert second.min() >= -1e-12
