import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semijost.special import (
    airy,
    bessel_I_imag,
    bessel_I_integral,
    bessel_pair_wronskian,
    gamma_one_plus_i_nu,
    large_nu_system,
    small_nu_system,
)


def _I(nu, w, sign=1):
    b = bessel_I_imag(nu, w, sign)
    return complex(b.value[0]) * math.exp(float(b.exponent[0])), complex(b.derivative[0]) * math.exp(
        float(b.exponent[0]))


def test_airy_at_zero():
    a = airy(0.0)
    assert a.ai[0] == pytest.approx(0.3550280538878172, rel=1e-14)


def test_airy_wronskian_random_points():
    x = np.random.default_rng(7).uniform(-20, 20, 100)
    a = airy(x, scaled=True)
    assert np.max(np.abs(a.ai * a.bi_prime - a.ai_prime * a.bi - 1 / math.pi)) <= 1e-12


@pytest.mark.parametrize("x", [-15.0, -4.6, -1.0, 0.7, 3.0, 4.6, 9.0])
def test_airy_against_mpmath(x):
    a = airy(x)
    assert a.ai[0] == pytest.approx(float(mp.airyai(x)), rel=1e-12)
    assert a.bi[0] == pytest.approx(float(mp.airybi(x)), rel=1e-12)
    assert a.ai_prime[0] == pytest.approx(float(mp.airyai(x, 1)), rel=1e-12)


def test_airy_decaying_asymptotics():
    x = np.array([5.0, 10.0, 20.0, 40.0])
    a = airy(x, scaled=True)
    corr = a.ai * math.sqrt(4 * math.pi) * x**0.25 - 1
    assert np.all(np.abs(corr) * x**1.5 < 0.2)


def test_airy_oscillatory_modulus():
    a = airy(-25.0)
    mod = math.hypot(a.ai[0], a.bi[0])
    assert mod == pytest.approx(25.0**-0.25 / math.sqrt(math.pi), rel=1e-2)


def test_bessel_i0():
    v, _ = _I(0.0, 1.0)
    assert v == pytest.approx(1.2660658777520082, rel=1e-14)


def test_bessel_small_argument_limit():
    nu, w = 1.5, 1e-4
    v, _ = _I(nu, w)
    lead = v * complex(mp.gamma(1 + 1j * nu)) * (w / 2) ** (-1j * nu)
    assert abs(lead - 1) < 1e-6


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("w", [0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
def test_series_vs_integral(nu, w):
    v, _ = _I(nu, w)
    assert abs(bessel_I_integral(nu, w) / v - 1) <= 1e-10


@pytest.mark.parametrize("nu,w", [(0.3, 2.0), (3.0, 7.0), (12.0, 25.0)])
def test_bessel_against_mpmath(nu, w):
    v, d = _I(nu, w)
    ref = complex(mp.besseli(1j * nu, w))
    assert abs(v / ref - 1) < 1e-11
    assert abs(d / complex(mp.besseli(1j * nu, w, derivative=1)) - 1) < 1e-11


@given(st.floats(min_value=0, max_value=8), st.floats(min_value=0.05, max_value=30))
def test_conjugation_and_nonvanishing(nu, w):
    vp, _ = _I(nu, w, 1)
    vm, _ = _I(nu, w, -1)
    assert abs(vm - vp.conjugate()) <= 1e-13 * abs(vp)
    assert abs(vp) > 0


@pytest.mark.parametrize("w", [0.3, 1.0, 4.0, 9.0])
def test_bessel_pair_wronskian(w):
    vp, dp = _I(1.0, w, 1)
    vm, dm = _I(1.0, w, -1)
    W = w * (vm * dp - dm * vp)
    # the two terms are each of size w|I|^2, so cancellation sets the floor
    cancel = w * abs(vp) * abs(dp) / abs(W)
    assert abs(W / (2j / math.pi * math.sinh(math.pi)) - 1) <= 1e-14 * max(cancel, 1.0)


def test_large_argument_behaviour():
    nu = 1.0
    ws = np.linspace(10, 30, 9)
    c = []
    for w in ws:
        b = bessel_I_imag(nu, w)
        v = complex(b.value[0]) * math.exp(float(b.exponent[0]) - w)
        lhs = math.sqrt(2 * math.pi * w) * v
        c.append(abs(lhs - 1 + 1j * math.exp(nu * math.pi - 2 * w)) * w)
    assert max(c) < 1.0


def test_gamma_values():
    assert gamma_one_plus_i_nu(0.0) == pytest.approx(1.0)
    assert abs(gamma_one_plus_i_nu(1.0)) ** 2 == pytest.approx(0.2720290549821332, rel=1e-13)


@given(st.floats(min_value=-40, max_value=40))
def test_gamma_modulus_identity(nu):
    g = gamma_one_plus_i_nu(nu)
    exact = 1.0 if nu == 0 else math.pi * nu / math.sinh(math.pi * nu)
    assert abs(g) ** 2 == pytest.approx(exact, rel=1e-12)
    assert gamma_one_plus_i_nu(-nu) == pytest.approx(g.conjugate(), rel=1e-13)


def test_small_nu_b1_macdonald():
    s = small_nu_system(0.0, w0=5.0)
    assert s.b1(np.array([5.0]))[0] == pytest.approx(-0.022643313497340619, rel=1e-9)


@pytest.mark.parametrize("nu", [0.0, 1.0, 5.0])
def test_small_nu_wronskians(nu):
    s = small_nu_system(nu)
    w = np.array([10.0, 15.0, 20.0])
    L1, d1 = s.log_B1(w)
    L2, d2 = s.log_B2(w)
    assert np.allclose(np.exp(L1 + L2) * (d2 - d1), 2.0, rtol=1e-10, atol=0)
    for sign in (1, -1):
        Lp, dp = s.log_B_pm(w, sign)
        W = np.exp(Lp + L1) * (d1 - dp)
        assert np.max(np.abs(W / bessel_pair_wronskian(nu, sign) - 1)) <= 1e-8


@pytest.mark.parametrize("nu", [0.5, 3.0])
def test_small_nu_error_functions_decay(nu):
    s = small_nu_system(nu)
    w = np.geomspace(10, 200, 12)
    b1, b2 = s.b1(w), s.b2(w)
    assert np.all(np.isreal(b1)) and np.all(np.isreal(b2))
    for b in (b1, b2):
        assert np.max(np.abs(b) * w) < 2 * (nu**2 + 0.25)
        slope = np.polyfit(np.log(w), np.log(np.abs(b)), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.2)


def test_small_nu_rejects_large_order():
    with pytest.raises(ValueError):
        small_nu_system(6.0, nu0=5.0)


def test_large_nu_decaying_solution():
    S = large_nu_system(10.0)
    a1 = S.a(np.array([5.0]), "one").real[0]
    assert abs(a1) < 1.0


@pytest.mark.parametrize("nu", [5.0, 20.0])
def test_large_nu_wronskian(nu):
    S = large_nu_system(nu)
    z = np.array([0.0, 0.5, 2.0, 5.0])
    L1, d1 = S.log_phi(z, "one")
    L2, d2 = S.log_phi(z, "two")
    W = np.exp(L1 + L2) * (d2 - d1)
    assert np.max(np.abs(W / W[0] - 1)) <= 1e-10
    assert abs(W[0] / (nu ** (2 / 3) / math.pi) - 1) <= 0.02 / nu


def test_large_nu_connection_tends_to_airy_combination():
    c1, c2 = S_conn = large_nu_system(20.0).connection(-1)
    assert abs(c1 - 1) < 5 / 20
    assert abs(c2 + 1j) < 5 / 20
    assert len(S_conn) == 2


def test_large_nu_minus_solution_against_series():
    S = large_nu_system(20.0)
    z = np.array([-5.0, -2.0, -0.5, 0.0])
    Lm, _ = S.log_phi(z, "minus")
    Le, _ = S.exact_log_minus(z)
    assert np.max(np.abs(np.exp(Lm - Le) - 1)) <= 1e-6


def test_large_nu_errors_bounded():
    S = large_nu_system(10.0)
    zp = np.linspace(0.0, 6.0, 13)
    zm = np.linspace(-6.0, 0.0, 13)
    for which, z in (("one", zp), ("two", zp), ("minus", zm), ("plus", zm)):
        assert np.max(np.abs(S.a(z, which))) < 1.0
