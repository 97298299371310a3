import cmath
import math

import mpmath as mp
import pytest

from semijost import (OracleConfig, closed_form_exponential, derive_params, exponential_family, free_potential,
                      integrate_jost, regge_wheeler, smatrix_oracle)
from semijost.oracle import OracleAccuracyError, _x_inf


def mp_closed_form(E, h):
    mp.mp.dps = 40
    nu = mp.mpf(2) * E / h
    y = mp.mpf(2)
    return complex(mp.power(2, -0.5) * mp.power(h, -1j * nu) * mp.gamma(1 - 1j * nu) * mp.sqrt(y)
                   * mp.besseli(-1j * nu, y / h))


@pytest.mark.parametrize("E,h", [(0.25, 0.5), (0.1, 0.2)])
def test_free_potential_is_plane_wave(E, h):
    p = derive_params(E, h)
    for x in (0.0, 3.0, -2.0):
        o = integrate_jost(free_potential(), p, 1, x)
        assert o.f.to_complex() == pytest.approx(cmath.exp(1j * E * x / h), abs=1e-11)
        assert o.log_derivative == pytest.approx(1j * E / h, abs=1e-11)


@pytest.mark.parametrize("E,h", [(0.1, 0.1), (0.05, 0.2), (0.3, 0.1), (0.02, 0.4)])
def test_closed_form_against_mpmath(E, h):
    p = derive_params(E, h)
    f, _ = closed_form_exponential(p)
    assert abs(f.to_complex() / mp_closed_form(E, h) - 1) <= 1e-12


@pytest.mark.parametrize("E,h", [(0.1, 0.1), (0.05, 0.2), (0.3, 0.05)])
def test_oracle_against_closed_form(E, h):
    p = derive_params(E, h)
    f, fp = closed_form_exponential(p)
    o = integrate_jost(exponential_family(), p)
    assert abs((o.f / f).to_complex() - 1) <= 1e-9
    assert abs(o.log_derivative / (fp / f).to_complex() - 1) <= 1e-9


def test_far_field_limit():
    p = derive_params(0.2, 0.2)
    f, _ = closed_form_exponential(p, 40.0)
    assert abs(f.to_complex() - cmath.exp(1j * p.E * 40.0 / p.hbar)) <= 1e-8
    o = integrate_jost(exponential_family(), p, 1, 40.0)
    assert abs(o.f.to_complex() - cmath.exp(1j * p.E * 40.0 / p.hbar)) <= 1e-8


def test_rtol_halving_stable():
    spec = exponential_family(coeffs=[0.5])
    p = derive_params(0.1, 0.1)
    a = integrate_jost(spec, p, config=OracleConfig(rtol=1e-10))
    b = integrate_jost(spec, p, config=OracleConfig(rtol=5e-11))
    assert abs((a.f / b.f).to_complex() - 1) <= 1e-8


def test_start_point_robustness():
    spec = exponential_family(coeffs=[0.5])
    p = derive_params(0.1, 0.1)
    x0 = _x_inf(spec, p.E, OracleConfig())
    a = integrate_jost(spec, p, config=OracleConfig(x_inf=x0))
    b = integrate_jost(spec, p, config=OracleConfig(x_inf=x0 + 5.0))
    assert abs((a.f / b.f).to_complex() - 1) <= 1e-9


@pytest.mark.parametrize("E,h", [(0.1, 0.2), (0.3, 0.1), (0.05, 0.4)])
def test_rw_drift_and_unitarity(E, h):
    spec = regge_wheeler(2)
    p = derive_params(E, h)
    for side in (1, -1):
        assert integrate_jost(spec, p, side).wronskian_drift <= 1e-8
    res = smatrix_oracle(spec, p)
    assert res.unitarity_defect <= 1e-8
    assert res.e_00 < 0


def test_drift_limit_enforced():
    p = derive_params(0.1, 0.1)
    with pytest.raises(OracleAccuracyError):
        integrate_jost(exponential_family(coeffs=[0.5]), p, config=OracleConfig(rtol=1e-4, drift_limit=1e-16))


def test_minus_side_mirror():
    spec = exponential_family(coeffs=[0.5])
    p = derive_params(0.1, 0.1)
    a = integrate_jost(spec, p, 1)
    b = integrate_jost(spec, p, -1)
    assert b.f.to_complex() == pytest.approx(a.f.to_complex(), rel=1e-13)
    assert b.log_derivative == pytest.approx(-a.log_derivative, rel=1e-13)


def test_closed_form_rejects_negative_x():
    with pytest.raises(ValueError):
        closed_form_exponential(derive_params(0.1, 0.1), -1.0)


def test_default_start_point_scales_with_energy():
    spec = exponential_family()
    assert _x_inf(spec, 0.01, OracleConfig()) > _x_inf(spec, 0.1, OracleConfig())
    assert math.isfinite(_x_inf(spec, 0.1, OracleConfig()))
