import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import rel_entr

from conftest import BUILTIN_SPECS, independent_tables, positive_tables
from fassoc import datasets
from fassoc.bvn import BvnSpec, discretize
from fassoc.divergence import (
    check_generator,
    f_divergence,
    independence_divergence,
    make_custom,
    make_kl,
    make_pearson,
    make_power,
    make_theta,
    parse_divergence,
)
from fassoc.errors import ParameterRangeError, ShapeMismatchError, ValidationError
from fassoc.measures import k1, v3
from fassoc.table import ProbabilityTable


def f(spec, x):
    return float(spec.f(np.array(x, dtype=float)))


def test_power_values():
    assert f(make_power(1), 2) == pytest.approx(1.0, abs=1e-15)
    assert f(make_power(0), 1) == 0.0
    assert f(make_power(0), math.e) == pytest.approx(math.e, rel=1e-15)
    assert f(make_power(0.5), 4) == pytest.approx(16 / 3, rel=1e-14)
    with pytest.raises(ParameterRangeError):
        make_power(-0.1)


def test_theta_values():
    xs = np.array([0.1, 0.5, 2.0, 7.0])
    assert np.allclose(make_theta(0).f(xs), xs**2 - xs, rtol=1e-14)
    assert f(make_theta(0.5), 3) == pytest.approx(6.0, rel=1e-15)
    for bad in (1.0, -0.2, 1.3):
        with pytest.raises(ParameterRangeError):
            make_theta(bad)


def test_slopes_at_infinity():
    assert make_kl().slope_at_infinity == math.inf
    assert make_power(0.4).slope_at_infinity == math.inf
    assert make_theta(0).slope_at_infinity == math.inf
    # (x-1)^2/(theta x) + x/(1-theta) grows like x (1/theta + 1/(1-theta))
    t = make_theta(0.5)
    assert t.slope_at_infinity == 4.0
    assert f(t, 1e9) / 1e9 == pytest.approx(4.0, rel=1e-8)


def test_labels_and_parsing():
    assert parse_divergence("power:0.6").label == "power:0.6"
    assert parse_divergence("theta:0.5").label == "theta:0.5"
    assert parse_divergence("kl").label == "kl"
    assert parse_divergence("pearson").label == "pearson"
    for bad in ("power", "kl:1", "renyi:2", "theta:abc"):
        with pytest.raises(ValidationError):
            parse_divergence(bad)


def test_pearson_hand_sum():
    p = np.array([[0.5, 0.0], [0.0, 0.5]])
    q = np.full((2, 2), 0.25)
    assert f_divergence(make_pearson(), p, q) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ShapeMismatchError):
        f_divergence(make_pearson(), p, np.full((2, 3), 1 / 6))


def test_zero_mass_conventions():
    p = np.array([[0.5, 0.0], [0.0, 0.5]])
    q = np.array([[0.5, 0.0], [0.5, 0.0]])
    # both-zero cells contribute nothing; p > 0 over q = 0 uses the slope at infinity
    assert f_divergence(make_theta(0.5), p, q) == pytest.approx(0.5 * 0 + 0.5 * f(make_theta(0.5), 0) + 0.5 * 4.0)
    assert f_divergence(make_kl(), p, q) == math.inf
    zero_row = np.array([[0.5, 0.5], [0.0, 0.0]])
    assert f_divergence(make_kl(), zero_row, zero_row) == 0.0


def test_generators_pass_probe_checks():
    for spec in BUILTIN_SPECS + [make_kl(), make_pearson(), make_power(3.0), make_theta(0.99)]:
        check_generator(spec)


def test_custom_generator():
    cubic = make_custom(lambda x: x**3 - x, lambda x: 3 * x**2 - 1, math.inf, "cubic")
    assert cubic.label == "cubic"
    p = discretize(BvnSpec.uniform(0.5, 3))
    # x^3 - x is six times the power generator at lambda = 2
    assert independence_divergence(cubic, p) == pytest.approx(6 * independence_divergence(make_power(2), p), rel=1e-12)
    with pytest.raises(ValidationError):
        make_custom(lambda x: (x - 1) ** 2, lambda x: 2 * (x - 1), math.inf)  # f(0) = 1
    with pytest.raises(ValidationError):
        make_custom(lambda x: -x * np.log(x), lambda x: -np.log(x) - 1, math.inf)  # concave
    with pytest.raises(ValidationError):
        make_custom(lambda x: x**2 - 0.5 * x, lambda x: 2 * x - 0.5, math.inf)  # f(1) != 0


@pytest.mark.parametrize("spec", BUILTIN_SPECS + [make_kl(), make_pearson()], ids=lambda s: s.label)
def test_derivative_matches_finite_differences(spec):
    xs = np.array([0.1, 0.5, 1.0, 2.0, 10.0])
    h = 1e-6 * xs
    fd = (spec.f(xs + h) - spec.f(xs - h)) / (2 * h)
    exact = spec.f_prime(xs)
    scale = np.maximum(np.abs(exact), 1.0)
    assert np.all(np.abs(fd - exact) / scale < 1e-6)


def test_power_limit_at_zero():
    xs = np.linspace(0.1, 10, 200)
    kl = make_power(0).f(xs)
    gaps = [np.max(np.abs(make_power(lam).f(xs) - kl)) for lam in (1e-3, 1e-4)]
    assert gaps[1] < gaps[0]
    assert np.max(np.abs(make_power(1e-8).f(xs) - kl)) < 1e-6


def test_independence_divergence_examples():
    u = ProbabilityTable(np.full((4, 4), 1 / 16))
    for spec in BUILTIN_SPECS:
        assert independence_divergence(spec, u) == 0.0
    rho8 = discretize(BvnSpec.uniform(0.8, 4))
    kl = make_power(0)
    assert round(independence_divergence(kl, rho8) / k1(kl, rho8), 3) == 0.254
    assert round(v3(make_power(1), datasets.sparse_artificial()).value, 3) == 0.254


@settings(max_examples=60, deadline=None)
@given(positive_tables())
def test_kl_matches_direct_sum(p):
    direct = rel_entr(p.probs, p.independence()).sum()
    assert independence_divergence(make_kl(), p) == pytest.approx(direct, rel=1e-10, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(positive_tables())
def test_theta_zero_is_pearson(p):
    a = independence_divergence(make_theta(0), p)
    b = independence_divergence(make_pearson(), p)
    assert abs(a - b) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(positive_tables(), st.sampled_from(BUILTIN_SPECS))
def test_nonnegative(p, spec):
    assert independence_divergence(spec, p) >= -1e-15


@settings(max_examples=40, deadline=None)
@given(independent_tables(), st.sampled_from(BUILTIN_SPECS))
def test_zero_at_independence(p, spec):
    assert abs(independence_divergence(spec, p)) < 1e-12
