import math

import mpmath
import numpy as np
import pytest

from orlicz_kit.disjointness import (
    BUDGET_CHAIN,
    compute_C0,
    compute_cascade,
    criterion_second_derivative,
    delta_of_eps,
    discriminating_alpha,
    h_M,
    second_derivative_at_zero,
    witness_split,
)
from orlicz_kit.errors import HypothesisViolation, InvalidInput, InvalidParameter
from orlicz_kit.geometry import (
    MULTI_INDICES,
    NormCurve,
    NormSurface,
    f_partial,
    n_prime,
    n_second,
    taylor_defect,
)
from orlicz_kit.luxemburg import LuxemburgSpace
from orlicz_kit.orlicz import make_exp_weighted, make_power
from orlicz_kit.samples import random_admissible_pair, random_disjoint_unit_pair, rng_for


@pytest.fixture(scope="module")
def exp4():
    return make_exp_weighted(4.0)


@pytest.fixture(scope="module")
def budget(exp4):
    return delta_of_eps(exp4, exp4, 0.2)


def test_cascade_of_one():
    assert compute_cascade(1) == (2, 18, 310)
    with pytest.raises(InvalidParameter):
        compute_cascade(0)


def test_C0_closed_form(exp4):
    # K = 19 and C(l) = l^4 e^(l - 1) for the exponentially weighted quartic
    expected = 3584 * 19**3 * (1.25**4 * math.exp(0.25) + 15**4 * math.exp(14))
    assert float(compute_C0(exp4)) == pytest.approx(expected, rel=1e-8)


def test_h_M(exp4):
    assert h_M(exp4, 1.25) == 1.0
    assert h_M(exp4, 2.0, dps=30) == 1
    scale = 6.25
    assert h_M(exp4, 0.2) == pytest.approx(scale**-4 * math.exp(1 - scale), rel=1e-10)
    with pytest.raises(InvalidParameter):
        h_M(exp4, 0.0)


def test_budget_chain(budget):
    assert budget.mode == "certified"
    assert budget.K == pytest.approx(19.0, rel=1e-9)
    with mpmath.workdps(50):
        assert budget.C1 == 2 * budget.C0
        assert budget.h1 == budget.h_M / (6 * budget.C0)
        assert 0 < budget.alpha0 < mpmath.mpf(1) / 8
        assert 0 < budget.delta <= mpmath.mpf(1) / 4
        assert budget.delta == min(budget.delta1, budget.delta2)
        assert budget.delta2 < budget.delta1

    data = budget.to_dict()
    assert set(BUDGET_CHAIN) <= set(data)
    assert data["delta"]["log10"] < -200
    assert data["provenance"]["dps"] == 50
    assert set(data["provenance"]) >= {"K", "delta2"}


def test_budget_for_two_functions(exp4, budget):
    mixed = delta_of_eps(make_power(4.0), exp4, 0.2)
    assert len(mixed.functions) == 2
    assert mixed.K == budget.K
    assert mixed.C0 == budget.C0


def test_square_is_not_good():
    M = make_power(2.0)
    with pytest.raises(HypothesisViolation) as excinfo:
        delta_of_eps(M, M, 0.2)
    assert excinfo.value.violations


def test_delta_of_eps_parameters(exp4):
    with pytest.raises(InvalidParameter):
        delta_of_eps(exp4, exp4, 0.0)
    with pytest.raises(InvalidParameter):
        delta_of_eps(exp4, exp4, 0.2, mode="optimistic")


def test_empirical_budget_is_larger(exp4, budget):
    empirical = delta_of_eps(
        exp4, exp4, 0.2, mode="empirical", empirical_kwargs={"samples": 50, "seed": 3}
    )
    assert empirical.mode == "empirical"
    assert empirical.delta > budget.delta
    assert empirical.C0 < budget.C0
    assert "empirical" in empirical.provenance


def test_witness_split_square():
    space = LuxemburgSpace(make_power(2.0), 2)
    pair = witness_split(space, space.vector([1.0, 0.1]), space.vector([0.1, 1.0]))
    assert pair.A.tolist() == [0]
    assert pair.B.tolist() == [1]
    assert pair.f_tilde.to_list() == [1.0, 0.0]
    assert pair.err_f == pytest.approx(0.1, rel=1e-10)
    assert pair.err_g == pytest.approx(0.1, rel=1e-10)
    assert pair.error == max(pair.err_f, pair.err_g)


def test_witness_split_ties_go_to_f():
    space = LuxemburgSpace(make_power(2.0), 2)
    f = space.vector([1.0, 0.0])
    pair = witness_split(space, f, f)
    assert pair.A.tolist() == [0, 1]
    assert pair.g_tilde.is_zero()
    assert pair.err_f == 0.0


def test_second_derivative_criterion(exp4):
    space = LuxemburgSpace(exp4, 2)
    disjoint_pair = NormSurface(space, space.basis(0), space.basis(1))
    assert second_derivative_at_zero(disjoint_pair) == 0.0
    assert not criterion_second_derivative(disjoint_pair, 0.2)

    f = space.normalize(space.vector([1.0, 1.0]))
    overlapping = NormSurface(space, f, f)
    assert second_derivative_at_zero(overlapping) > 0
    assert criterion_second_derivative(overlapping, 0.2)


def test_partials_are_bounded_by_C0(exp4, budget):
    space = LuxemburgSpace(exp4, 4)
    rng = rng_for(5)
    bound = float(budget.C0)
    for _ in range(20):
        surface = NormSurface(space, *random_admissible_pair(space, rng))
        alpha = rng.uniform(-0.49, 0.49)
        eta = rng.uniform(0.13, 1.99)
        for beta in MULTI_INDICES:
            assert abs(f_partial(surface, alpha, eta, beta)) <= bound


def test_discriminating_alpha(exp4, budget):
    space = LuxemburgSpace(exp4, 2)
    u, v = space.basis(0), space.basis(1)
    f = space.normalize(space.vector([1.0, 1.0]))
    g = space.normalize(space.vector([1.0, 0.5]))
    certificate = discriminating_alpha(budget, space, u, v, f, g)
    assert certificate.margin > 0
    assert certificate.case in (1, 2)
    assert abs(certificate.alpha) == budget.alpha0
    assert certificate.dps > 250
    assert certificate.to_dict()["margin"]["log10"] < 0


def test_discriminating_alpha_rejects_bad_input(exp4, budget):
    space = LuxemburgSpace(exp4, 2)
    u, v = space.basis(0), space.basis(1)
    with pytest.raises(HypothesisViolation):
        discriminating_alpha(budget, space, u, v, u, v)
    f = space.normalize(space.vector([1.0, 1.0]))
    with pytest.raises(InvalidInput):
        discriminating_alpha(budget, space, f, v, f, v)
    with pytest.raises(InvalidInput):
        discriminating_alpha(budget, space, u, v, 2.0 * u, v)


def test_taylor_defect_within_cubic_bound(exp4, budget):
    space = LuxemburgSpace(exp4, 4)
    rng = rng_for(17)
    bound = float(budget.C3) / 6
    for _ in range(50):
        curve = NormCurve(NormSurface(space, *random_admissible_pair(space, rng)))
        for alpha in rng.uniform(-0.4, 0.4, size=20):
            assert taylor_defect(curve, alpha) <= bound * abs(alpha) ** 3


def test_disjoint_pairs_expand_at_most_cubically(exp4, budget):
    space = LuxemburgSpace(exp4, 6)
    rng = rng_for(19)
    dps = 300
    for _ in range(100):
        u, v = random_disjoint_unit_pair(space, rng)
        with mpmath.workdps(dps):
            base = space.norm_mp(u, dps)
            for alpha in (budget.alpha0, -budget.alpha0, budget.alpha0 / 2):
                coords = [mpmath.mpf(a) + alpha * mpmath.mpf(b) for a, b in zip(u.coords, v.coords)]
                assert space.norm_mp(coords, dps) - base <= budget.C * abs(alpha) ** 3
        for alpha in (0.1, -0.25, 0.4):
            assert space.norm(u + alpha * v) <= space.norm(u) + float(budget.C) * abs(alpha) ** 3


def _even_pair(space, rng):
    """f, g with f + alpha g a coordinate swap of f - alpha g, so N'(0) = 0."""
    half = space.dim // 2
    a = np.abs(rng.normal(size=half)) + 0.1
    b = rng.normal(size=half)
    f = space.normalize(space.vector(np.repeat(a, 2)))
    g = space.normalize(space.vector(np.column_stack([b, -b]).ravel()))
    return f, g


def test_flat_curves_without_witness_bend_by_at_least_2h1(exp4, budget):
    space = LuxemburgSpace(exp4, 6)
    rng = rng_for(29)
    h1 = float(budget.h1)
    checked = 0
    for _ in range(200):
        surface = NormSurface(space, *_even_pair(space, rng))
        curve = NormCurve(surface)
        if abs(n_prime(curve, 0.0)) > h1 or not criterion_second_derivative(surface, 0.2):
            continue
        checked += 1
        assert n_second(curve, 0.0) > 2 * h1
    assert checked > 100
