import math

import numpy as np
import pytest
from scipy.special import lambertw
from hypothesis import given
from hypothesis import strategies as st

from semijost.params import (
    DomainError,
    SpecValidationError,
    TurningPointError,
    UnsupportedOrderError,
    derive_params,
    epsilon_coefficients,
    eval_potential,
    exponential_family,
    regge_wheeler,
    solve_tortoise_r,
    tail_epsilon,
    turning_points,
    validate_spec,
)

positive = st.floats(min_value=1e-8, max_value=10.0, allow_nan=False)


def test_derive_params_examples():
    p = derive_params(0.1, 0.2)
    assert p.alpha == pytest.approx(0.2236068, abs=1e-7)
    assert p.nu == pytest.approx(1.0)
    assert p.hbar1 == pytest.approx(0.8944272, abs=1e-7)
    p = derive_params(1e-12, 0.2)
    assert p.alpha == pytest.approx(0.1)
    assert p.hbar1 == pytest.approx(2.0)
    assert p.nu == pytest.approx(1e-11)
    p = derive_params(0.5, 0.001)
    assert p.nu == pytest.approx(1000.0)
    assert p.alpha == pytest.approx(1.000000125, rel=1e-12)
    assert p.hbar1 == pytest.approx(0.0009999999, rel=1e-7)


@pytest.mark.parametrize("E,hbar", [(0.0, 0.1), (-1.0, 0.1), (0.1, 0.0), (0.1, -2.0)])
def test_derive_params_rejects_nonpositive(E, hbar):
    with pytest.raises(DomainError):
        derive_params(E, hbar)


@given(positive, positive)
def test_parameter_identities(E, hbar):
    p = derive_params(E, hbar)
    ulp = np.spacing(p.alpha**2)
    assert abs(p.alpha**2 - hbar**2 / 4 - 4 * E**2) <= 4 * ulp + 4 * np.spacing(4 * E**2 + hbar**2 / 4)
    assert abs(p.nu * hbar - 2 * E) <= 4 * np.spacing(2 * E)
    assert 0 < p.hbar1 < 2
    assert p.hbar1 == pytest.approx((p.nu**2 + 0.25) ** -0.5, rel=1e-12)
    # squared form: √(4 - ħ₁²) cancels as ħ₁ → 2
    assert p.nu**2 == pytest.approx((4 - p.hbar1**2) / (4 * p.hbar1**2), rel=1e-9, abs=1e-14)


def test_eval_potential_examples():
    spec = exponential_family()
    assert eval_potential(spec, 0.0) == pytest.approx(1.0)
    assert eval_potential(spec, 2.0, 1) == pytest.approx(-math.exp(-2.0), rel=1e-14)
    rw = regge_wheeler(2, 0)
    assert eval_potential(rw, 2.0) == pytest.approx(0.125, rel=1e-13)


def test_unsupported_derivative_order():
    with pytest.raises(UnsupportedOrderError):
        eval_potential(exponential_family(K=4), 0.5, 5)


def test_turning_points_exponential():
    spec = exponential_family()
    lo, hi = turning_points(spec, derive_params(0.1, 0.1))
    assert hi == pytest.approx(-2 * math.log(0.1), abs=1e-10)
    assert lo == pytest.approx(2 * math.log(0.1), abs=1e-10)
    _, hi = turning_points(spec, derive_params(math.exp(-1), 0.1))
    assert hi == pytest.approx(2.0, abs=1e-10)


def test_turning_point_errors():
    with pytest.raises(TurningPointError):
        turning_points(exponential_family(), derive_params(1.5, 0.1))


@given(st.floats(min_value=1e-3, max_value=0.9))
def test_turning_points_nondegenerate(E):
    spec = regge_wheeler(10, 0)
    p = derive_params(E * math.sqrt(float(np.max(eval_potential(spec, np.linspace(-5, 10, 3001))))), 0.1)
    for xt in turning_points(spec, p):
        assert eval_potential(spec, xt) == pytest.approx(p.E**2, rel=1e-9)
        h = 1e-5
        d = (eval_potential(spec, xt + h) - eval_potential(spec, xt - h)) / (2 * h)
        assert abs(d) >= 1e-3 * p.E**2 / math.sqrt(1 + xt * xt)


def test_tail_epsilon_examples():
    u = np.array([0.01, 0.2, 0.5])
    assert np.all(tail_epsilon(exponential_family(), 1, u) == 0)
    half = exponential_family(coeffs=(0.5,))
    assert np.allclose(tail_epsilon(half, 1, u), u / 2)
    assert np.allclose(tail_epsilon(half, 1, u, 1), 0.5)


def test_regge_wheeler_left_tail_against_tortoise_inversion():
    rw = regge_wheeler(10, 0)
    coef = epsilon_coefficients(rw, -1)
    assert coef[0] == 0.0
    # V on the far left from r(x) directly, divided by the leading e^{x} term
    x = np.array([-12.0, -10.0, -8.0])
    u = np.exp(x)
    eps = tail_epsilon(rw, -1, u)
    lin = np.polyfit(u, eps, 2)[1]
    assert lin == pytest.approx(coef[1], rel=1e-4)


def test_tortoise_examples():
    assert solve_tortoise_r(2.0) == pytest.approx(2.0, rel=1e-15)
    assert solve_tortoise_r(100.0) == pytest.approx(95.45190919246676, rel=1e-13)
    assert solve_tortoise_r(-20.0) - 1 < 1e-8
    assert solve_tortoise_r(-20.0) - 1 == pytest.approx(math.exp(-21.000000000758256), rel=1e-9)


@given(st.floats(min_value=-40, max_value=200), st.floats(min_value=1e-6, max_value=50))
def test_tortoise_inverse_and_monotone(x, dx):
    r1, r2 = solve_tortoise_r(x), solve_tortoise_r(x + dx)
    # r - 1 = W(e^{x-1}) with W the Lambert function
    exact = 1.0 + float(lambertw(math.exp(x - 1.0)).real)
    assert r1 == pytest.approx(exact, rel=1e-13)
    # r is strictly increasing; in floating point it may stall once r - 1 < ulp(1) / dx
    assert r1 <= r2
    if (r1 - 1.0) * dx > 1e-12:
        assert r1 < r2


@pytest.mark.parametrize("spec", [exponential_family(), exponential_family(coeffs=(0.5,)), regge_wheeler(10, 0),
                                  regge_wheeler(10, 1)])
def test_potential_positive_and_tail_consistent(spec):
    x = np.linspace(-50, 50, 1000)
    assert np.all(eval_potential(spec, x) > 0)
    for side in (1, -1):
        if spec.tail(side) is None:
            continue
        xs = x[side * x >= spec.a]
        u = np.exp(-np.abs(xs))
        lead = spec.amplitude(side) * u
        assert np.allclose(eval_potential(spec, xs), lead * (1 + tail_epsilon(spec, side, spec.amplitude(side) * u)),
                           rtol=1e-12, atol=0)


def test_rejects_small_cutoff():
    with pytest.raises(SpecValidationError):
        validate_spec(exponential_family(a=0.01))


def test_regge_wheeler_sigma_minus_three_is_screened():
    # σ = -3 is accepted only when the sampled potential stays positive
    try:
        spec = regge_wheeler(2, -3)
    except SpecValidationError:
        return
    assert np.all(eval_potential(spec, np.linspace(-50, 50, 1000)) > 0)
