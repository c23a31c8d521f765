import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orlicz_kit.errors import EvaluationError, InvalidFunction, InvalidParameter
from orlicz_kit.orlicz import (
    GridSpec,
    check_good,
    delta2_constant,
    from_config,
    growth_constants,
    inverse,
    k_constant,
    log_delta2_constant,
    make_custom,
    make_exp_weighted,
    make_power,
    submult_constant,
)


@pytest.fixture(scope="module")
def exp4():
    return make_exp_weighted(4.0)


def test_power_values_and_derivatives():
    M = make_power(4)
    assert M(2.0) == pytest.approx(16.0)
    assert M.deriv1(2.0) == pytest.approx(32.0)
    assert M.deriv2(2.0) == pytest.approx(48.0)
    assert M.deriv3(2.0) == pytest.approx(48.0)
    assert M(-2.0) == M(2.0)
    assert M.family_tag == "power:4"


def test_exp_weighted_is_normalized(exp4):
    assert float(exp4(1.0)) == 1.0
    assert float(exp4(0.0)) == 0.0


@pytest.mark.parametrize("order", [1, 2, 3])
@pytest.mark.parametrize("t", [0.05, 0.7, 1.0, 3.0, 12.0])
def test_exp_weighted_derivatives_match_mpmath(exp4, order, t):
    expected = float(mpmath.diff(exp4.mp_eval, t, order))
    assert float(exp4.derivative(order, t)) == pytest.approx(expected, rel=1e-9)


def test_family_parameter_ranges():
    with pytest.raises(InvalidParameter):
        make_power(1.0)
    with pytest.raises(InvalidParameter):
        make_exp_weighted(3.0)
    with pytest.raises(InvalidParameter):
        make_power(4).derivative(4, 1.0)


def test_from_config():
    assert from_config({"family": "power", "p": 3}).p == 3.0
    assert from_config({"family": "exp_weighted", "p": "5"}).family == "exp_weighted"
    with pytest.raises(InvalidParameter):
        from_config({"family": "gaussian", "p": 3})
    with pytest.raises(InvalidParameter):
        from_config({"family": "power"})


def test_custom_finite_difference_fallbacks():
    M = make_custom(lambda t: np.power(t, 4), name="quartic")
    t = np.array([0.5, 1.0, 2.0])
    assert not M.analytic
    np.testing.assert_allclose(M.deriv1(t), 4 * t**3, rtol=1e-7)
    np.testing.assert_allclose(M.deriv2(t), 12 * t**2, rtol=1e-5)
    np.testing.assert_allclose(M.deriv3(t), 24 * t, rtol=1e-4)


def test_custom_with_closed_forms_is_analytic():
    M = make_custom(
        lambda t: np.power(t, 5),
        deriv1=lambda t: 5 * np.power(t, 4),
        deriv2=lambda t: 20 * np.power(t, 3),
        deriv3=lambda t: 60 * np.power(t, 2),
    )
    assert M.analytic
    assert M.deriv3(2.0) == pytest.approx(240.0)
    assert check_good(M).is_good


def test_inverse():
    assert inverse(make_power(2), 4.0) == pytest.approx(2.0)
    assert inverse(make_power(2), 0.0) == 0.0
    M = make_exp_weighted(5)
    assert float(M(inverse(M, 0.5))) == pytest.approx(0.5)
    with pytest.raises(InvalidParameter):
        inverse(M, -1.0)


def test_check_good_accepts_exp_weighted(exp4):
    report = check_good(exp4)
    assert report.is_good, report.violations
    # sup of t M'/M = 4 + t is reached at the end of (0, 15]
    assert report.K == pytest.approx(19.0, rel=1e-9)


def test_check_good_rejects_square():
    report = check_good(make_power(2))
    assert not report.is_good
    assert any("o(t^3)" in v for v in report.violations)


def test_check_good_accepts_quartic():
    report = check_good(make_power(4))
    assert report.is_good, report.violations
    assert report.K == pytest.approx(4.0)


def test_check_good_needs_fine_grid(exp4):
    with pytest.raises(InvalidParameter):
        check_good(exp4, GridSpec(1e-6, 15.0, 100))
    with pytest.raises(InvalidParameter):
        check_good(exp4, GridSpec(1e-6, 10.0, 4096))


def test_check_good_reports_evaluation_failure():
    M = make_custom(lambda t: np.where(t > 10, np.nan, t**4), name="broken")
    with pytest.raises(EvaluationError) as excinfo:
        check_good(M)
    assert excinfo.value.point > 10


def test_k_constant_power():
    assert k_constant(make_power(6)) == pytest.approx(6.0)


def test_delta2_constant_closed_forms(exp4):
    assert delta2_constant(make_power(3), 2.0) == pytest.approx(8.0, rel=1e-12)
    # M(lx)/M(x) = l^4 e^((l-1)x) peaks at x = 1
    assert delta2_constant(exp4, 2.0) == pytest.approx(16 * math.e, rel=1e-12)
    with pytest.raises(InvalidParameter):
        delta2_constant(exp4, 1.0)


def test_log_delta2_constant_in_arbitrary_precision(exp4):
    value = log_delta2_constant(exp4, 1e6, dps=40)
    assert isinstance(value, mpmath.mpf)
    expected = 4 * mpmath.log(mpmath.mpf(10) ** 6) + mpmath.mpf(10) ** 6 - 1
    assert mpmath.almosteq(value, expected, rel_eps=mpmath.mpf("1e-30"))


def test_submult_power_is_identically_one():
    result = submult_constant(make_power(4), 0.1)
    assert not result.holds
    assert result.alpha == pytest.approx(1.0, abs=1e-10)


def test_submult_exp_weighted(exp4):
    # M(tu) / (M(t) M(u)) = e^((1-t)(1-u)), smallest at t = u = 1 - eps
    result = submult_constant(exp4, 0.1)
    assert result.holds
    assert result.alpha == pytest.approx(math.exp(0.01), abs=1e-9)

    precise = submult_constant(exp4, 0.1, dps=30)
    assert precise.holds
    assert mpmath.almosteq(precise.alpha, mpmath.exp(mpmath.mpf("0.01")), rel_eps=1e-15)
    assert precise.to_dict()["precision"] == 30


def test_submult_needs_normalized_function():
    M = make_custom(lambda t: 2 * np.power(t, 4))
    with pytest.raises(InvalidFunction):
        submult_constant(M, 0.1)
    with pytest.raises(InvalidParameter):
        submult_constant(make_power(4), 1.5)


def test_growth_constants(exp4):
    growth = growth_constants(exp4)
    data = growth.to_dict()
    assert data["K"] == pytest.approx(19.0, rel=1e-9)
    assert data["C(5/4)"] == pytest.approx(1.25**4 * math.exp(0.25), rel=1e-12)
    assert set(data["grid_spec"]) == {"K", "delta2"}


def test_grid_spec_validation():
    with pytest.raises(InvalidParameter):
        GridSpec(1.0, 0.5, 10).points()
    assert GridSpec(1e-3, 1.0, 4).points()[-1] == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(1.5, 7.5), t=st.floats(1e-3, 10.0))
def test_log_eval_matches_eval(p, t):
    for M in (make_power(p), make_exp_weighted(max(p, 3.5))):
        assert float(M.log_eval(t)) == pytest.approx(math.log(float(M(t))), rel=1e-12, abs=1e-12)
