import math

from hypothesis import assume, given
from hypothesis import strategies as st
from pytest import approx, mark, raises

from analysis.errors import ConfigurationError
from experiments.regimes import (ENDPOINT, INFINITE, INFINITE_FLAG, LOG_REGIME_FLAG,
                                 POLYNOMIAL_P_LT_Q, POLYNOMIAL_Q_LT_P, UNCONDITIONAL,
                                 classify_regime, predicted_exponent, reference_upper_bound)


@mark.parametrize("p q s regime exponent".split(), (
    (6.0, 2.0, -0.7, POLYNOMIAL_Q_LT_P, 0.2),
    (2.0, 4.0, 0.3, POLYNOMIAL_P_LT_Q, 0.05),
    (3.0, 2.0, 0.0, UNCONDITIONAL, 0.0),
    (2.0, 3.0, 0.2, UNCONDITIONAL, 0.0),
))
def test_predicted_exponent_examples(p, q, s, regime, exponent):
    prediction = predicted_exponent(p, q, s)
    assert prediction.regime == regime
    assert prediction.exponent == approx(exponent, abs=1e-12)
    assert prediction.flag is None


@mark.parametrize("p q s lower".split(), ((6.0, 2.0, -0.5, 0.5), (2.0, 4.0, 0.25, 0.25),
                                          (6.0, 3.0, -2.0 / 3.0, 2.0 / 3.0)))
def test_endpoints_are_logarithmic(p, q, s, lower):
    prediction = predicted_exponent(p, q, s)
    assert prediction.regime == ENDPOINT
    assert prediction.exponent is None
    assert prediction.flag == LOG_REGIME_FLAG
    assert prediction.lower_log_rate == approx(lower)
    assert prediction.upper_log_rate == 1.0


@mark.parametrize("p q s".split(), ((2.0, 2.0, 0.5), (2.0, 2.0, -0.5), (4.0, 2.0, 0.9),
                                    (1.5, 3.0, -0.5)))
def test_outside_the_haar_range_is_infinite(p, q, s):
    prediction = predicted_exponent(p, q, s)
    assert prediction.regime == INFINITE
    assert prediction.flag == INFINITE_FLAG
    assert reference_upper_bound(p, q, s, 3) == math.inf


@mark.parametrize("p q s".split(), ((1.0, 2.0, 0.0), (2.0, 1.0, 0.0), (2.0, math.inf, 0.0),
                                    (2.0, 2.0, math.nan)))
def test_classify_rejects_bad_exponents(p, q, s):
    with raises(ConfigurationError):
        classify_regime(p, q, s)


exponents = st.floats(1.05, 20.0)
smoothness = st.floats(-1.0, 1.0)


@given(exponents, exponents, smoothness)
def test_classification_matches_the_inequalities(p, q, s):
    tol = 1e-9
    p_dual, q_dual = p / (p - 1), q / (q - 1)
    boundaries = (1 / p, -1 / p_dual, 1 / q, -1 / q_dual)
    assume(all(abs(s - b) > tol for b in boundaries))
    regime = classify_regime(p, q, s)
    if not -1 / p_dual < s < 1 / p:
        assert regime == INFINITE
    elif max(-1 / p_dual, -1 / q_dual) < s < min(1 / p, 1 / q):
        assert regime == UNCONDITIONAL
    elif s > 1 / q:
        assert regime == POLYNOMIAL_P_LT_Q
        assert p < q
    else:
        assert regime == POLYNOMIAL_Q_LT_P
        assert q < p


@given(exponents, exponents, smoothness)
def test_predicted_exponents_are_positive_off_the_unconditional_region(p, q, s):
    prediction = predicted_exponent(p, q, s)
    if prediction.regime in (POLYNOMIAL_P_LT_Q, POLYNOMIAL_Q_LT_P):
        assert prediction.exponent > 0


def test_exponent_vanishes_towards_the_endpoint():
    q = 2.0
    below = predicted_exponent(6.0, q, -0.5 - 1e-6)
    assert below.regime == POLYNOMIAL_Q_LT_P
    assert below.exponent == approx(0.0, abs=1e-5)


def test_reference_upper_bound():
    assert reference_upper_bound(6.0, 2.0, -0.7, 5) == approx(2.0 ** (5 * 0.2))
    assert reference_upper_bound(3.0, 2.0, 0.0, 5) == 1.0
    assert reference_upper_bound(6.0, 2.0, -0.5, 4, 2) == approx(4 ** 0.5 * 2 ** 0.5)
    assert reference_upper_bound(2.0, 3.0, 1.0 / 3.0, 8) == approx(8 ** (1 / 3) * 8 ** (2 / 3))
    with raises(ConfigurationError):
        reference_upper_bound(6.0, 2.0, -0.7, 0)
