import math

import numpy as np
import pytest

from semijost import (closed_form_exponential, derive_params, exponential_family, integrate_jost, jost_boundary,
                      large_nu_parts, regge_wheeler, small_nu_parts)
from semijost.fundamental import match_point, reflect_boundary, regime_of

# f+(0) for V = e^{-|x|}, evaluated with mpmath besseli at 40 digits
FROZEN = {
    (0.1, 0.1): -1735220.1001199755 - 7188253.7214428231j,
    (0.05, 0.2): 1175.3824670357046 + 2043.2695809994135j,
    (0.3, 0.05): 384499081.14206664 - 5279832102.1251534j,
}


def rel(a, b):
    return abs(a / b - 1)


@pytest.mark.parametrize("E,h", list(FROZEN))
def test_pure_exponential_against_frozen(E, h):
    p = derive_params(E, h)
    f, _ = closed_form_exponential(p)
    assert rel(f.to_complex(), FROZEN[E, h]) <= 1e-12
    jb = jost_boundary(exponential_family(), p)
    assert rel(jb.f.to_complex(), FROZEN[E, h]) <= 1e-10


@pytest.mark.parametrize("E,h", [(0.02, 0.1), (0.1, 0.05), (0.2, 0.025), (0.25, 0.2)])
def test_pure_exponential_derivative(E, h):
    p = derive_params(E, h)
    f, fp = closed_form_exponential(p)
    jb = jost_boundary(exponential_family(), p)
    assert rel((jb.f_prime / jb.f).to_complex(), (fp / f).to_complex()) <= 1e-9


def test_pure_exponential_leading_equals_converged():
    p = derive_params(0.1, 0.1)
    a = jost_boundary(exponential_family(), p, mode="converged")
    b = jost_boundary(exponential_family(), p, mode="leading")
    assert rel(a.f.to_complex(), b.f.to_complex()) <= 1e-12


def test_zero_tail_gives_zero_corrections():
    sp = small_nu_parts(exponential_family(), derive_params(0.1, 0.1))
    assert sp.c_check_pm.sup <= 1e-13
    assert sp.c_check_2.sup <= 1e-13
    lp = large_nu_parts(exponential_family(), derive_params(0.3, 0.05))
    assert lp.sigma_pm.sup <= 1e-13


@pytest.mark.parametrize("E,h", [(0.1, 0.1), (0.05, 0.05), (0.3, 0.05), (0.2, 0.2)])
def test_exp_tail_against_oracle(E, h):
    spec = exponential_family(coeffs=[0.5])
    p = derive_params(E, h)
    o = integrate_jost(spec, p)
    jb = jost_boundary(spec, p)
    assert (jb.f / o.f).to_complex() == pytest.approx(1.0, abs=1e-9)
    assert jb.log_derivative == pytest.approx(o.log_derivative, rel=1e-9)
    assert jb.direct_route_discrepancy <= 1e-10


def test_leading_mode_error_is_order_hbar():
    spec = exponential_family(coeffs=[0.5])
    errs = []
    for h in (0.2, 0.1, 0.05):
        p = derive_params(h, h)
        o = integrate_jost(spec, p)
        jb = jost_boundary(spec, p, mode="leading")
        errs.append(abs((jb.f / o.f).to_complex() - 1))
    assert all(e < 0.05 for e in errs)
    for a, b in zip(errs, errs[1:]):
        assert 1.5 <= a / b <= 2.8


def test_minus_side_of_symmetric_potential_is_reflection():
    spec = exponential_family(coeffs=[0.5])
    p = derive_params(0.1, 0.1)
    plus = jost_boundary(spec, p, 1)
    minus = jost_boundary(spec, p, -1)
    assert minus.f.to_complex() == pytest.approx(plus.f.to_complex(), rel=1e-13)
    assert minus.f_prime.to_complex() == pytest.approx(-plus.f_prime.to_complex(), rel=1e-13)
    again = reflect_boundary(reflect_boundary(plus))
    assert again.f_prime.to_complex() == plus.f_prime.to_complex()


@pytest.mark.parametrize("E,h", [(0.1, 0.1), (0.3, 0.05)])
def test_wronskian_constant_along_mesh(E, h):
    jb = jost_boundary(exponential_family(coeffs=[0.5]), derive_params(E, h))
    assert jb.wronskian_variation <= 1e-10


def test_regimes_agree_in_overlap():
    spec = exponential_family(coeffs=[0.5])
    for nu in (3.0, 5.0, 7.0):
        p = derive_params(0.5 * nu * 0.05, 0.05)
        a = jost_boundary(spec, p, threshold=1e9)
        b = jost_boundary(spec, p, threshold=0.0)
        assert a.regime == "small_nu" and b.regime == "large_nu"
        assert abs((a.f / b.f).to_complex() - 1) <= 1e-5


def test_regime_selection_and_match_point():
    assert regime_of(5.0) == "small_nu"
    assert regime_of(5.01) == "large_nu"
    assert regime_of(2.0, threshold=1.0) == "large_nu"
    assert match_point(1.0) == 10.0
    assert match_point(6.0) == pytest.approx(6 * math.pi)


def test_rw_minus_side_uses_tail_and_plus_side_oracle():
    spec = regge_wheeler(2)
    p = derive_params(0.1, 0.2)
    plus = jost_boundary(spec, p, 1)
    minus = jost_boundary(spec, p, -1)
    assert plus.source == "oracle"
    assert minus.source == "liouville_green"
    o = integrate_jost(spec, p, -1)
    assert (minus.f / o.f).to_complex() == pytest.approx(1.0, abs=1e-8)


def test_boundary_data_finite_and_scaled():
    jb = jost_boundary(exponential_family(), derive_params(0.3, 0.01))
    assert math.isfinite(jb.f.log_abs())
    assert jb.f.log_abs() > 50
    assert np.isfinite(jb.S) and jb.S > 0
