import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semijost import (Scaled, amplitudes, derivative_scaling_check, derive_params, exponential_family, fit_exponents,
                      free_potential, jost_boundary, smatrix_oracle, spectral_measure, wkb_action)
from semijost.scattering import FitError, SingularWronskianError, fit_exponent_data, scattering_result
from semijost.sweep import scatter

S_WKB_01 = 3.39169818617314509  # mpmath quad for V = e^{-|x|}, E = 0.1


@pytest.mark.filterwarnings("ignore::semijost.scattering.PrecisionWarning")
def test_free_anchor():
    p = derive_params(0.25, 0.5)
    res = smatrix_oracle(free_potential(), p)
    assert abs(res.t.to_complex() - 1) <= 1e-12
    assert abs(res.r) <= 1e-12
    assert res.e_00 == pytest.approx(-1.0, abs=1e-12)


def test_amplitudes_from_free_wronskian():
    p = derive_params(0.3, 0.2)
    W = Scaled.of(2j * p.E / p.hbar)
    t, r, defect = amplitudes(W, Scaled.of(0.0 + 0j), p)
    assert t.to_complex() == pytest.approx(1.0)
    assert r == 0
    assert defect <= 1e-15


def test_singular_wronskian():
    with pytest.raises(SingularWronskianError):
        amplitudes(Scaled.of(0j), Scaled.of(1 + 0j), derive_params(0.3, 0.2))


@pytest.mark.parametrize("E,h", [(0.02, 0.4), (0.1, 0.1), (0.3, 0.05), (0.05, 0.025)])
def test_unitarity_and_wronskian_bound(E, h):
    p = derive_params(E, h)
    spec = exponential_family(coeffs=[0.5])
    res = scatter(spec, p, "perturbative_converged")
    assert res.unitarity_defect <= 1e-10
    assert res.W_mp.log_abs() >= math.log(2 * E / h) - 1e-12
    assert res.e_00 < 0


def test_tunnelling_is_exponentially_small():
    res = scatter(exponential_family(), derive_params(0.1, 0.02), "closed_form")
    assert res.t.log_abs() < -100
    assert abs(res.r) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=10)
@given(st.floats(min_value=0.02, max_value=0.3), st.floats(min_value=0.05, max_value=0.4))
def test_identity_and_direct_spectral_measure_agree(E, h):
    # at moderate ħ the direct imaginary parts are still resolved
    p = derive_params(E, h)
    plus = jost_boundary(exponential_family(), p)
    minus = jost_boundary(exponential_family(), p, -1)
    a = spectral_measure(minus, plus, p, use_identity=True)
    b = spectral_measure(minus, plus, p, use_identity=False)
    assert a == pytest.approx(b, rel=1e-6)


def test_scattering_result_fields():
    p = derive_params(0.1, 0.1)
    plus = jost_boundary(exponential_family(), p)
    res = scattering_result(jost_boundary(exponential_family(), p, -1), plus, p)
    assert res.log10_abs_t == pytest.approx(res.t.log_abs() / math.log(10))
    assert res.warnings == ()


def test_wkb_action_reference():
    assert wkb_action(exponential_family(), derive_params(0.1, 0.05)) == pytest.approx(S_WKB_01, rel=1e-10)


def test_wkb_action_decreases_with_energy():
    vals = [wkb_action(exponential_family(), derive_params(E, 0.1)) for E in (0.05, 0.1, 0.2, 0.4)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_fit_exponent_data_synthetic():
    hb = np.array([0.04, 0.02, 0.01, 0.005, 0.0025])
    p = derive_params(0.1, 0.04)
    fit = fit_exponent_data(hb, -S_WKB_01 / hb + 0.3, -hb * np.exp(-2 * 0.17 / hb), exponential_family(), p)
    assert fit.S_fit == pytest.approx(S_WKB_01, rel=1e-10)
    assert fit.S_tilde_fit == pytest.approx(0.17, rel=1e-10)
    assert fit.slope_error <= 1e-10
    assert fit.r2 == pytest.approx(1.0)


def test_fit_rejects_short_or_noisy_data():
    p = derive_params(0.1, 0.04)
    with pytest.raises(FitError):
        fit_exponent_data([0.1, 0.05], [-1, -2], [-1, -1], exponential_family(), p)
    with pytest.raises(FitError):
        fit_exponent_data(np.linspace(0.01, 0.05, 5), -np.ones(5), [0.0] * 5, exponential_family(), p)
    rng = np.random.default_rng(1)
    hb = np.linspace(0.01, 0.05, 8)
    with pytest.raises(FitError):
        fit_exponent_data(hb, rng.normal(size=8), -np.ones(8), exponential_family(), p)


def test_fit_exponents_on_closed_form():
    spec = exponential_family()
    hb = [0.04, 0.03, 0.02, 0.015, 0.01]
    res = [scatter(spec, derive_params(0.1, h), "closed_form") for h in hb]
    fit = fit_exponents(hb, res, spec, derive_params(0.1, hb[0]))
    assert fit.slope_error < 0.05
    assert fit.S_tilde_fit > 0


def test_derivative_scaling_bounded_symbol():
    spec = exponential_family()

    def q(E, h):
        return h * scatter(spec, derive_params(E, h), "closed_form").t.log_abs()

    rep = derivative_scaling_check(q, [0.1, 0.2], [0.08, 0.04, 0.02], ell=1)
    assert rep.bounded and not rep.inconclusive
    assert all(1 / 3 <= r <= 3 for r in rep.ratios)


def test_derivative_scaling_detects_growth():
    rep = derivative_scaling_check(lambda E, h: E**2 / h**3, [0.1, 0.2], [0.08, 0.04, 0.02], ell=1)
    assert not rep.bounded
    assert rep.ratios[0] == pytest.approx(4.0, rel=1e-6)


def test_derivative_scaling_rejects_order():
    with pytest.raises(ValueError):
        derivative_scaling_check(lambda E, h: E, [0.1], [0.1], ell=3)
