import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from semijost.special import small_nu_system
from semijost.volterra import VolterraProblem, derivative_scaling_probe, perturbed_solution, solve


def sech2(x):
    return np.where(np.abs(x) < 350, 1.0 / np.cosh(np.clip(x, -350, 350)) ** 2, 0.0)


def pt_kernel(x):
    return -2.0 * sech2(x) + 0j


@pytest.mark.parametrize("omega", [0.5, 1.5, 4.0])
def test_exponential_kernel_exact_solution(omega):
    # u'' = (ω² - 2 sech²x) u has the decaying solution e^{-ωx}(ω + tanh x)/(ω + 1)
    sol = solve(VolterraProblem("exponential", pt_kernel, (-5.0, 30.0), omega=omega))
    x = np.linspace(-5.0, 20.0, 26)
    exact = (np.tanh(x) - 1.0) / (omega + 1.0)
    assert np.max(np.abs(sol(x) - exact)) <= 1e-12
    assert np.max(np.abs(sol.derivative(x) - sech2(x) / (omega + 1.0))) <= 1e-11


def test_zero_kernel_gives_zero():
    zero = lambda x: np.zeros(np.shape(x), dtype=complex)  # noqa: E731
    for kind in ("airy_decaying", "airy_growing"):
        base = "infinity" if kind == "airy_decaying" else "finite"
        sol = solve(VolterraProblem(kind, zero, (0.0, 8.0), base=base))
        assert sol.sup == 0.0
    sol = solve(VolterraProblem("exponential", zero, (0.0, 10.0), omega=2.0))
    assert sol.sup == 0.0


def test_limit_independent_of_starting_guess():
    prob = VolterraProblem("exponential", pt_kernel, (-5.0, 30.0), omega=1.5)
    x = np.linspace(-5.0, 10.0, 16)
    a = solve(prob)(x)
    for start in (0.1, -0.3, 1.0):
        assert np.max(np.abs(solve(prob, phi_init=start)(x) - a)) <= 1e-13


def test_contraction_ratios_recorded():
    sol = solve(VolterraProblem("exponential", pt_kernel, (-5.0, 30.0), omega=1.5))
    assert sol.iterations > 1
    assert sol.residual <= 1e-12


def test_finite_base_growing_kernel_matches_ode():
    omega = 1.0
    sol = solve(VolterraProblem("exponential", pt_kernel, (0.0, 6.0), base="finite", omega=omega))
    rhs = lambda x, y: [y[1], (omega**2 - 2.0 * sech2(x)) * y[0]]  # noqa: E731
    ref = solve_ivp(rhs, (0.0, 6.0), [1.0, omega], rtol=1e-12, atol=1e-14, dense_output=True, method="DOP853")
    x = np.linspace(0.5, 6.0, 12)
    u = np.exp(omega * x) * (1.0 + sol(x))
    assert np.max(np.abs(u.real / ref.sol(x)[0] - 1.0)) <= 1e-9


def test_macdonald_reference():
    assert small_nu_system(0.0, w0=5.0).b1(np.array([5.0]))[0] == pytest.approx(-0.0226433134973406, rel=1e-9)


@pytest.mark.parametrize("c", [0.3, -0.5, 2.0])
def test_perturbed_solution_constant_source(c):
    # u'' - u = c u with u(0) = 1, u'(0) = 1 on top of u0 = e^x
    sol = perturbed_solution(lambda x: np.asarray(x) + 0j, lambda x: np.full(np.shape(x), c + 0j), (0.0, 4.0))
    k = math.sqrt(1.0 + c)
    x = np.linspace(0.0, 4.0, 9)
    exact = (np.cosh(k * x) + np.sinh(k * x) / k) * np.exp(-x) - 1.0
    assert np.max(np.abs(sol(x) - exact)) <= 1e-11


def test_derivative_scaling_probe_slope():
    def family(lam):
        return VolterraProblem("exponential", lambda x: pt_kernel(x) / lam, (-5.0, 30.0), omega=1.0)

    out = derivative_scaling_probe(family, np.array([100.0, 200.0, 400.0, 800.0]), np.linspace(-3, 3, 7), ell=1)
    assert out["slope"] == pytest.approx(-2.0, abs=0.05)
    out0 = derivative_scaling_probe(family, np.array([100.0, 200.0, 400.0, 800.0]), np.linspace(-3, 3, 7), ell=0)
    assert out0["slope"] == pytest.approx(-1.0, abs=0.05)
