"""Direct integration of −ħ²f″ + Vf = E²f from the asymptotic region.

Used as ground truth for the Liouville-Green pipeline.  The outgoing
solution f₊ ~ e^{ikx}, k = E/ħ, is started far out and integrated inward:

* exponential side: exact series f = e^{ikx} Σ a_N e^{-Nx} at x_inf;
* power-law side (no exponential tail): asymptotic series of the Riccati
  variable in q = 1/r, evaluated where its smallest term is below rounding;
* oscillatory zone: linear system for h = e^{-ikx} f;
* beyond the turning point (minus a buffer): Riccati form for y = f′/f
  together with log f, so the e^{S/ħ} growth never overflows.

The phase kx is always stripped off the state so that it never enters the
rounding error.  f₋ is computed as f₊ of the reflected potential.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .params import (
    PotentialSpec,
    SemiParams,
    TurningPointError,
    eval_potential,
    far_field_data,
    turning_points,
)
from .scaled import Scaled
from .special import bessel_I_imag, log_gamma


class OracleError(RuntimeError):
    pass


class StiffnessError(OracleError):
    pass


class OracleAccuracyError(OracleError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    x_inf: float | None = None
    rtol: float = 1e-12
    atol: float = 1e-300
    correction_order: int = 2
    buffer: float = 0.5
    drift_limit: float = 1e-8
    x_cap: float = 80.0


@dataclass(frozen=True)
class OracleJost:
    f: Scaled
    f_prime: Scaled
    log_derivative: complex
    wronskian_drift: float
    x: float


def _x_inf(spec: PotentialSpec, E: float, cfg: OracleConfig) -> float:
    if cfg.x_inf is not None:
        return cfg.x_inf
    A = spec.amplitude(1)
    x = math.log(max(A, 1e-300) / (1e-14 * E * E))
    return min(max(x, spec.a), cfg.x_cap)


def _series_start(spec: PotentialSpec, params: SemiParams, x0: float, order: int):
    """h = e^{-ikx} f and h′ at x0 from the convergent e^{-Nx} expansion.

    Substituting f = e^{ikx} Σ a_N e^{-Nx} gives
    ħ² N(N − 2ik) a_N = Σ_{n=1}^N c_n a_{N−n}, a₀ = 1.  The first term is
    the single Volterra iteration of the outgoing integral equation.
    """
    c = spec.tail(1)
    k = params.E / params.hbar
    deg = max(len(c) - 1, 1)
    n_max = max(order, 1) * deg
    a = [1.0 + 0j]
    for N in range(1, n_max + 1):
        s = sum(c[n] * a[N - n] for n in range(1, min(N, len(c) - 1) + 1))
        a.append(s / (params.hbar**2 * N * (N - 2j * k)))
    u = math.exp(-x0)
    h = sum(aN * u**N for N, aN in enumerate(a))
    dh = sum(-N * aN * u**N for N, aN in enumerate(a))
    return complex(h), complex(dh)


def _far_field_series(spec, params, q):
    """(u, ℓ) at q for a power-law side, u = f′/f − ik, ℓ = log f − ikx.

    With d/dx = D(q) d/dq, the Riccati equation D u_q = V/ħ² − 2iku − u²
    fixes the q-expansion of u term by term; ℓ = ∫_0^q u/D dq follows
    termwise.  The expansion is asymptotic, so it is cut at its smallest
    term; the return value carries that term as an error estimate.
    """
    vq, dq, _ = far_field_data(spec)
    hb2 = params.hbar**2
    k = params.E / params.hbar
    n_max = 400
    vq = np.concatenate([vq, np.zeros(n_max + 1 - len(vq))])
    u = np.zeros(n_max + 1, dtype=complex)
    best = math.inf
    n_stop = n_max
    for n in range(2, n_max + 1):
        conv = np.dot(u[1:n], u[n - 1:0:-1])
        deriv = sum(dq[j] * (n - j + 1) * u[n - j + 1] for j in range(2, len(dq)) if n - j + 1 >= 1)
        u[n] = (vq[n] / hb2 - conv - deriv) / (2j * k)
        term = abs(u[n]) * q**n
        if term < best:
            best = term
        elif term > 4.0 * best:
            n_stop = n - 1
            break
        if term < 1e-18 * abs(u[2]) * q * q:
            n_stop = n
            break
    u = u[: n_stop + 1]
    # u/D with D = q² D̃; D̃ has a nonzero constant term
    dt = dq[2:]
    w = np.zeros(n_stop - 1, dtype=complex)
    for m in range(n_stop - 1):
        acc = u[m + 2] - sum(dt[j] * w[m - j] for j in range(1, min(m, len(dt) - 1) + 1))
        w[m] = acc / dt[0]
    powers = q ** np.arange(n_stop + 1)
    u_val = complex(np.dot(u, powers))
    ell = complex(np.dot(w / np.arange(1, n_stop), powers[1:n_stop]))
    return u_val, ell, best


def _linear(spec, params, x0, x1, h0, dh0, cfg):
    hb2 = params.hbar**2
    k = params.E / params.hbar

    def rhs(x, s):
        h = s[0] + 1j * s[1]
        g = s[2] + 1j * s[3]
        dg = -2j * k * g + float(eval_potential(spec, x)) / hb2 * h
        return [s[2], s[3], dg.real, dg.imag]

    sol = solve_ivp(rhs, (x0, x1), [h0.real, h0.imag, dh0.real, dh0.imag],
                    method="DOP853", rtol=cfg.rtol, atol=cfg.atol)
    if sol.status != 0:
        raise StiffnessError(sol.message)
    h = sol.y[0] + 1j * sol.y[1]
    g = sol.y[2] + 1j * sol.y[3]
    w = (np.conj(h) * g).imag / k + np.abs(h) ** 2
    drift = float(np.max(np.abs(w / w[0] - 1.0)))
    return h[-1], g[-1], drift


def _riccati(spec, params, x0, x1, y0, ell0, cfg):
    """Integrate y′ = (V − E²)/ħ² − y², ℓ′ = y − ik with y = f′/f."""
    hb2 = params.hbar**2
    k = params.E / params.hbar
    E2 = params.E**2

    def rhs(x, s):
        y = s[0] + 1j * s[1]
        dy = (float(eval_potential(spec, x)) - E2) / hb2 - y * y
        return [dy.real, dy.imag, s[0], s[1] - k]

    atol = np.array([1e-300, 1e-300, 1e-13, 1e-13])
    sol = solve_ivp(rhs, (x0, x1), [y0.real, y0.imag, ell0.real, ell0.imag],
                    method="DOP853", rtol=cfg.rtol, atol=atol)
    if sol.status != 0:
        raise StiffnessError(sol.message)
    # |f|² Im y = k
    log_w = 2.0 * sol.y[2] + np.log(sol.y[1])
    log_w = log_w - log_w[0]
    drift = float(np.max(np.abs(np.expm1(log_w))))
    y = sol.y[0, -1] + 1j * sol.y[1, -1]
    ell = sol.y[2, -1] + 1j * sol.y[3, -1]
    return y, ell, drift


def _far_field(spec, params, cfg):
    """Starting point and (u, ℓ) for a power-law side, pushed out until the
    asymptotic series is accurate to working precision."""
    k = params.E / params.hbar
    r = max(50.0, 30.0 / k)
    for _ in range(12):
        u, ell, err = _far_field_series(spec, params, 1.0 / r)
        if err <= 1e-17 * max(abs(u), 1e-300):
            x = far_field_data(spec)[2](1.0 / r)
            return x, u, ell
        r *= 2.0
    raise OracleError("far-field series did not reach working precision")


def _plus_side(spec: PotentialSpec, params: SemiParams, x_target: float, cfg: OracleConfig) -> OracleJost:
    k = params.E / params.hbar
    try:
        x_t = turning_points(spec, params)[1]
        x_sw = x_t - cfg.buffer
    except TurningPointError:
        x_sw = -math.inf
    drift = 0.0

    # state is ("lin", h, h′) at x with h = e^{-ikx} f
    if spec.tail(1) is not None:
        x = _x_inf(spec, params.E, cfg)
        if x_target >= x:
            h, dh = _series_start(spec, params, x_target, cfg.correction_order)
            return _assemble_linear(h, dh, k, x_target, 0.0)
        h, dh = _series_start(spec, params, x, cfg.correction_order)
        state = ("lin", h, dh)
    else:
        x, u, ell = _far_field(spec, params, cfg)
        if x_target >= x:
            raise OracleError("x_target lies in the far-field zone")
        h = cmath.exp(ell)
        state = ("lin", h, h * u)

    if x_sw > x_target and x > x_sw:
        h, dh, d = _linear(spec, params, x, x_sw, state[1], state[2], cfg)
        drift = max(drift, d)
        y = dh / h + 1j * k
        ell = cmath.log(h)
        x = x_sw
        y, ell, d = _riccati(spec, params, x, x_target, y, ell, cfg)
        drift = max(drift, d)
        return _assemble_riccati(y, ell, k, x_target, drift)
    if x <= x_sw:
        # started inside the barrier already
        h, dh = state[1], state[2]
        y, ell, d = _riccati(spec, params, x, x_target, dh / h + 1j * k, cmath.log(h), cfg)
        return _assemble_riccati(y, ell, k, x_target, max(drift, d))
    h, dh, d = _linear(spec, params, x, x_target, state[1], state[2], cfg)
    return _assemble_linear(h, dh, k, x_target, max(drift, d))


def _assemble_linear(h, dh, k, x, drift):
    f = Scaled.of(h) * cmath.exp(1j * k * x)
    y = dh / h + 1j * k
    return OracleJost(f=f, f_prime=f * y, log_derivative=complex(y), wronskian_drift=drift, x=x)


def _assemble_riccati(y, ell, k, x, drift):
    f = Scaled.from_log(ell + 1j * k * x)
    return OracleJost(f=f, f_prime=f * y, log_derivative=complex(y), wronskian_drift=drift, x=x)


def integrate_jost(spec: PotentialSpec, params: SemiParams, side: int = 1, x_target: float = 0.0,
                   config: OracleConfig | None = None) -> OracleJost:
    """Jost solution f_± and its derivative at x_target by direct integration."""
    cfg = config or OracleConfig()
    if side > 0:
        res = _plus_side(spec, params, x_target, cfg)
    else:
        r = _plus_side(spec.reflected(), params, -x_target, cfg)
        res = OracleJost(f=r.f, f_prime=-r.f_prime, log_derivative=-r.log_derivative,
                         wronskian_drift=r.wronskian_drift, x=x_target)
    if res.wronskian_drift > cfg.drift_limit:
        raise OracleAccuracyError(f"Wronskian drift {res.wronskian_drift:.3e} exceeds {cfg.drift_limit:.1e}")
    return res


def closed_form_exponential(params: SemiParams, x: float = 0.0) -> tuple[Scaled, Scaled]:
    """Exact f₊ and f₊′ for V = e^{-|x|}, x ≥ 0.

    f₊(x) = e^{x/4} 2^{-1/2} ħ^{-iν} Γ(1−iν) √y I_{−iν}(y/ħ),  y = 2e^{-x/2}.
    """
    if x < 0:
        raise ValueError("closed form holds on x >= 0")
    nu, hbar = params.nu, params.hbar
    y = 2.0 * math.exp(-0.5 * x)
    b = bessel_I_imag(nu, y / hbar, order_sign=-1)
    val, der, ex = complex(b.value[0]), complex(b.derivative[0]), float(b.exponent[0])
    log_f = (0.25 * x - 0.5 * math.log(2.0) - 1j * nu * math.log(hbar) + log_gamma(1.0 - 1j * nu)
             + 0.5 * math.log(y) + cmath.log(val) + ex)
    f = Scaled.from_log(complex(log_f))
    return f, f * (-(y / (2.0 * hbar)) * der / val)


def smatrix_oracle(spec: PotentialSpec, params: SemiParams, config: OracleConfig | None = None):
    """ScatteringResult from oracle boundary data on both sides."""
    from .scattering import scattering_result

    plus = integrate_jost(spec, params, 1, 0.0, config)
    minus = plus_reflection(plus) if spec.symmetric else integrate_jost(spec, params, -1, 0.0, config)
    return scattering_result(minus, plus, params, use_identity=False)


def plus_reflection(jb: OracleJost) -> OracleJost:
    """f₋ at 0 for a symmetric potential: f₋(0) = f₊(0), f₋′(0) = −f₊′(0)."""
    return OracleJost(f=jb.f, f_prime=-jb.f_prime, log_derivative=-jb.log_derivative,
                      wronskian_drift=jb.wronskian_drift, x=-jb.x)
