"""Airy functions, modified Bessel functions of imaginary order, complex Gamma,
and the small-ν / large-ν Bessel fundamental systems.

Airy functions use the Maclaurin series near the origin.  Further out they
are written in Liouville-Green form, e.g. Ai(x) = (4π)^{-1/2} x^{-1/4}
e^{-ξ}[1 + a(ξ)] with ξ = (2/3)x^{3/2}, and the correction a is the
converged solution of its Volterra equation; past ξ = 25 the correction's
asymptotic series is exact to rounding and replaces the table.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .volterra import VolterraProblem, scaled_cumulative, solve, solve_on_mesh
from .quadrature import build_mesh, graded_breaks

# ---------------------------------------------------------------------------
# complex Gamma (Lanczos, g = 7)

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def log_gamma(z):
    """Principal-branch-free log Γ(z) for Re z ≥ 1/2 (reflection below)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    low = z.real < 0.5
    if np.any(low):
        zl = z[low]
        out[low] = np.log(np.pi / np.sin(np.pi * zl)) - log_gamma(1.0 - zl)
    zh = z[~low] - 1.0
    acc = np.full(zh.shape, _LANCZOS[0], dtype=complex)
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc = acc + c / (zh + i)
    t = zh + _LANCZOS_G + 0.5
    out[~low] = 0.5 * math.log(2 * math.pi) + (zh + 0.5) * np.log(t) - t + np.log(acc)
    return out if out.ndim else complex(out)


def gamma_one_plus_i_nu(nu: float) -> complex:
    """Γ(1 + iν)."""
    return complex(np.exp(log_gamma(1.0 + 1j * nu)))


# ---------------------------------------------------------------------------
# Airy functions

_AI0 = 0.355028053887817239260
_AIP0 = 0.258819403792806798405  # -Ai'(0)
_X_POS = 2.0  # Maclaurin on [-4.5, 2]; Ai's series cancels beyond 2
_X_NEG = 4.5
_XI_ASYM = 25.0
_C_AIRY = 5.0 / 36.0


@dataclass(frozen=True)
class AiryValues:
    """Ai, Ai', Bi, Bi' at real arguments.

    With scaled=True the Ai pair is multiplied by e^{ξ} and the Bi pair by
    e^{-ξ} for x > 0 (ξ = (2/3)x^{3/2}); `xi` records the factor used.
    """

    ai: np.ndarray
    ai_prime: np.ndarray
    bi: np.ndarray
    bi_prime: np.ndarray
    xi: np.ndarray


def _maclaurin(x: np.ndarray):
    x = np.asarray(x, dtype=float)
    x3 = x**3
    f = np.ones_like(x)
    fp = np.zeros_like(x)
    g = x.copy()
    gp = np.ones_like(x)
    tf = np.ones_like(x)
    tg = x.copy()
    for k in range(1, 60):
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        f = f + tf
        g = g + tg
        with np.errstate(invalid="ignore", divide="ignore"):
            fp = fp + np.where(x != 0, 3 * k * tf / np.where(x != 0, x, 1.0), 0.0)
            gp = gp + np.where(x != 0, (3 * k + 1) * tg / np.where(x != 0, x, 1.0), 0.0)
        if np.all(np.abs(tf) + np.abs(tg) < 1e-18 * (np.abs(f) + np.abs(g))):
            break
    ai = _AI0 * f - _AIP0 * g
    aip = _AI0 * fp - _AIP0 * gp
    bi = math.sqrt(3.0) * (_AI0 * f + _AIP0 * g)
    bip = math.sqrt(3.0) * (_AI0 * fp + _AIP0 * gp)
    return ai, aip, bi, bip


def lg_asymptotic(xi, c: float, omega: complex, terms: int = 40):
    """Correction a and a' for ψ = e^{-ωξ}(1 + a) solving ψ'' - ω²ψ = -c ξ^{-2} ψ.

    The coefficients follow from substituting Σ d_m ξ^{-m} into the ODE:
    d_m = -(c + m(m-1)) d_{m-1} / (2ωm).  Asymptotic; used where its
    smallest term is below rounding.
    """
    xi = np.asarray(xi, dtype=float)
    d = 1.0 + 0j
    a = np.zeros(xi.shape, dtype=complex)
    ap = np.zeros(xi.shape, dtype=complex)
    for m in range(1, terms + 1):
        d = -(c + m * (m - 1)) * d / (2.0 * omega * m)
        a = a + d * xi ** (-m)
        ap = ap - m * d * xi ** (-m - 1)
    return a, ap


class _AiryTables:
    """Converged Volterra corrections for the three Liouville-Green forms."""

    def __init__(self):
        xi_pos = (2.0 / 3.0) * _X_POS**1.5
        xi_neg = (2.0 / 3.0) * _X_NEG**1.5
        b = lambda s: -_C_AIRY / s**2 + 0j  # noqa: E731
        X = _XI_ASYM + 5.0
        # Ai: decaying e^{-ξ}, base at infinity
        self.ai = solve(VolterraProblem("exponential", b, (xi_pos, X), omega=1.0,
                                        tail=tuple(v[0] for v in lg_asymptotic([X], _C_AIRY, 1.0))))
        # Ai(-x) - iBi(-x) ∝ e^{iξ}(1 + a): base at infinity, ω = -i
        self.osc = solve(VolterraProblem("exponential", b, (xi_neg, X), omega=-1j, cap=0.5,
                                         tail=tuple(v[0] for v in lg_asymptotic([X], _C_AIRY, -1j))))
        # Bi: growing e^{ξ}, started from Maclaurin data at x = 2
        _, _, bi0, bip0 = _maclaurin(np.array([_X_POS]))
        x0 = _X_POS
        psi = math.sqrt(math.pi) * x0**0.25 * bi0[0]
        dpsi = math.sqrt(math.pi) * (0.25 * x0**-0.75 * bi0[0] + x0**0.25 * bip0[0]) / math.sqrt(x0)
        a0 = psi * math.exp(-xi_pos) - 1.0
        ap0 = dpsi * math.exp(-xi_pos) - (1.0 + a0)
        brk = graded_breaks(xi_pos, X, lambda s: np.ones_like(s), 0.5)
        mesh = build_mesh(brk, 16, None)
        self.bi = solve_on_mesh(mesh, mesh.x + 0j, mesh.x_breaks + 0j, b(mesh.x), base="left",
                                phi_base=a0, dphi_base=ap0)
        self.xi_pos = xi_pos
        self.xi_neg = xi_neg


@lru_cache(maxsize=1)
def _tables() -> _AiryTables:
    return _AiryTables()


def _correction(sol, xi, omega):
    """a, a' from the table below ξ = 25 and the asymptotic series above."""
    xi = np.asarray(xi, dtype=float)
    a = np.empty(xi.shape, dtype=complex)
    ap = np.empty(xi.shape, dtype=complex)
    far = xi >= _XI_ASYM
    if np.any(far):
        a[far], ap[far] = lg_asymptotic(xi[far], _C_AIRY, omega)
    if np.any(~far):
        a[~far] = sol(xi[~far])
        ap[~far] = sol.derivative(xi[~far])
    return a, ap


def airy(x, scaled: bool = False) -> AiryValues:
    """Ai, Ai', Bi, Bi' for real x (vectorised)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    bi = np.empty_like(x)
    bip = np.empty_like(x)
    xi = np.where(x > 0, (2.0 / 3.0) * np.abs(x) ** 1.5, 0.0)
    mid = (x >= -_X_NEG) & (x <= _X_POS)
    if np.any(mid):
        r = _maclaurin(x[mid])
        ai[mid], aip[mid], bi[mid], bip[mid] = r
        if scaled:
            e = np.exp(xi[mid])
            ai[mid] *= e
            aip[mid] *= e
            bi[mid] /= e
            bip[mid] /= e
    tab = None
    pos = x > _X_POS
    if np.any(pos):
        tab = _tables()
        xp = x[pos]
        s = xi[pos]
        a, ap = _correction(tab.ai, s, 1.0)
        b, bp = _correction(tab.bi, s, -1.0)
        a, ap, b, bp = a.real, ap.real, b.real, bp.real
        q = xp**-0.25
        # y = c x^{-1/4} ψ(ξ), y' = c(-x^{-5/4}ψ/4 + x^{1/4} dψ/dξ)
        ca = 1.0 / math.sqrt(4 * math.pi)
        cb = 1.0 / math.sqrt(math.pi)
        eA = 1.0 if scaled else np.exp(-s)
        eB = 1.0 if scaled else np.exp(s)
        ai[pos] = ca * q * eA * (1 + a)
        aip[pos] = ca * eA * (-0.25 * xp**-1.25 * (1 + a) + xp**0.25 * (-(1 + a) + ap))
        bi[pos] = cb * q * eB * (1 + b)
        bip[pos] = cb * eB * (-0.25 * xp**-1.25 * (1 + b) + xp**0.25 * ((1 + b) + bp))
    neg = x < -_X_NEG
    if np.any(neg):
        tab = tab or _tables()
        xm = -x[neg]
        s = (2.0 / 3.0) * xm**1.5
        a, ap = _correction(tab.osc, s, -1j)
        c = cmath.exp(-0.25j * math.pi) / math.sqrt(math.pi)
        ph = np.exp(1j * s)
        val = c * xm**-0.25 * ph * (1 + a)
        # d/dx at x = -xm: -(d/dxm)
        dval = -c * (-0.25 * xm**-1.25 * ph * (1 + a) + xm**0.25 * ph * (1j * (1 + a) + ap))
        ai[neg] = val.real
        bi[neg] = -val.imag
        aip[neg] = dval.real
        bip[neg] = -dval.imag
    return AiryValues(ai, aip, bi, bip, xi if scaled else np.zeros_like(x))


def airy_log(x, which: str):
    """Complex log of Ai, Bi or Ai ± iBi at real x, finite far past overflow."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = airy(x, scaled=True)
    xi = v.xi
    if which == "ai":
        return np.log(v.ai + 0j) - xi
    if which == "bi":
        return np.log(v.bi + 0j) + xi
    if which in ("ai+ibi", "osc+"):
        return np.log(v.ai * np.exp(-2 * xi) + 1j * v.bi + 0j) + xi if np.any(xi) else np.log(v.ai + 1j * v.bi)
    if which in ("ai-ibi", "osc-"):
        return np.log(v.ai * np.exp(-2 * xi) - 1j * v.bi + 0j) + xi if np.any(xi) else np.log(v.ai - 1j * v.bi)
    raise ValueError(which)


def airy_log_derivative(x, which: str):
    """u'/u for u = Ai, Bi, Ai ± iBi (scaled internally)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = airy(x, scaled=True)
    e2 = np.exp(-2 * v.xi)
    if which == "ai":
        return v.ai_prime / v.ai
    if which == "bi":
        return v.bi_prime / v.bi
    sgn = 1.0 if which in ("ai+ibi", "osc+") else -1.0
    return (v.ai_prime * e2 + sgn * 1j * v.bi_prime) / (v.ai * e2 + sgn * 1j * v.bi)


# ---------------------------------------------------------------------------
# modified Bessel functions of imaginary order


@dataclass(frozen=True)
class BesselImagOrder:
    """I_{iν}(w) and its derivative, both as mantissa · e^{exponent}.

    `cond` is Σ|terms| / |Σ terms| of the series, the cancellation factor
    that bounds the attainable relative accuracy.
    """

    nu: float
    w: np.ndarray
    value: np.ndarray
    derivative: np.ndarray
    exponent: np.ndarray
    cond: np.ndarray

    def unscaled(self):
        e = np.exp(self.exponent)
        return self.value * e, self.derivative * e


def _bessel_series_log(mu: complex, w: np.ndarray, chunk: int = 512):
    """Σ_k (w²/4)^k / (k! (1+μ)_k) and its w-derivative, scaled.

    Returns (S, dS, log_scale, cond) with the true sums equal to
    S·e^{log_scale}.  The sum starts at 1 and never underflows.
    """
    w = np.asarray(w, dtype=float)
    S = np.empty(w.shape, dtype=complex)
    dS = np.empty(w.shape, dtype=complex)
    scale = np.empty(w.shape)
    cond = np.empty(w.shape)
    flat = w.ravel()
    order = np.argsort(flat)
    Sf = np.empty(flat.shape, dtype=complex)
    dSf = np.empty(flat.shape, dtype=complex)
    scf = np.empty(flat.shape)
    cof = np.empty(flat.shape)
    for start in range(0, len(flat), chunk):
        idx = order[start : start + chunk]
        ww = flat[idx]
        kmax = int(0.5 * ww.max() + 12.0 * math.sqrt(ww.max() + 1.0) + 40)
        k = np.arange(1, kmax + 1)
        logq = np.log(ww[:, None] ** 2 / 4.0) - np.log(k)[None, :] - np.log(k + mu)[None, :]
        logt = np.concatenate([np.zeros((len(ww), 1), dtype=complex), np.cumsum(logq, axis=1)], axis=1)
        m = logt.real.max(axis=1)
        t = np.exp(logt - m[:, None])
        s = t.sum(axis=1)
        kk = np.arange(0, kmax + 1)
        ds = (t * (2.0 * kk)[None, :]).sum(axis=1) / ww
        Sf[idx] = s
        dSf[idx] = ds
        scf[idx] = m
        cof[idx] = np.abs(t).sum(axis=1) / np.abs(s)
    S[...] = Sf.reshape(w.shape)
    dS[...] = dSf.reshape(w.shape)
    scale[...] = scf.reshape(w.shape)
    cond[...] = cof.reshape(w.shape)
    return S, dS, scale, cond


def bessel_I_imag(nu: float, w, order_sign: int = 1) -> BesselImagOrder:
    """I_{±iν}(w) for w > 0 from the power series (scaled).

    I_μ(w) = (w/2)^μ / Γ(1+μ) · Σ_k (w²/4)^k / (k!(1+μ)_k),  μ = ±iν.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w <= 0):
        raise ValueError("w must be positive")
    mu = order_sign * 1j * nu
    S, dS, scale, cond = _bessel_series_log(mu, w)
    lg = log_gamma(1.0 + mu)
    pre = np.exp(mu * np.log(w / 2.0) - lg)
    val = pre * S
    der = pre * (mu / w * S + dS)
    # move |pre| into the exponent
    lp = (mu * np.log(w / 2.0) - lg).real
    val = val * np.exp(-lp)
    der = der * np.exp(-lp)
    return BesselImagOrder(nu, w, val, der, scale + lp, cond)


def bessel_I_integral(nu: float, w: float, order_sign: int = 1, level: int = 7) -> complex:
    """Validation oracle from the integral representation

    I_μ(w) = (w/2)^μ / (√π Γ(μ+1/2)) ∫_0^π sin(θ)^{2μ} e^{w cos θ} dθ,

    evaluated by double-exponential quadrature (the endpoint factor
    sin^{2iν} oscillates logarithmically)."""
    mu = order_sign * 1j * nu
    h = 2.0**-level
    kmax = int(6.0 / h)
    k = np.arange(-kmax, kmax + 1) * h
    # θ = π/2 (1 + tanh(π/2 sinh k))
    u = 0.5 * math.pi * np.sinh(k)
    th_lo = 0.5 * math.pi / (np.exp(2 * u) + 1.0) * 2.0  # π - θ written stably
    weight = 0.5 * math.pi * 0.5 * math.pi * np.cosh(k) / np.cosh(u) ** 2
    theta = math.pi - th_lo
    # sin θ = sin(π - θ); use the small complementary angle when θ near π
    sin_t = np.where(theta < 0.5 * math.pi, np.sin(theta), np.sin(th_lo))
    ok = sin_t > 0
    f = np.zeros_like(k, dtype=complex)
    f[ok] = np.exp(2 * mu * np.log(sin_t[ok]) + w * np.cos(theta[ok]) - w)
    integral = h * np.sum(weight * f)
    lg = log_gamma(mu + 0.5)
    return complex(np.exp(mu * math.log(w / 2.0) - lg + w) / math.sqrt(math.pi) * integral)


def bessel_B(nu: float, v, sign: int):
    """B_±(v) = 2^{±iν} Γ(1±iν) √v I_{±iν}(v) = v^{1/2±iν}[1 + b_±(v)].

    Returns (log B, B'/B) with the series carried in scaled form.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    mu = sign * 1j * nu
    S, dS, scale, cond = _bessel_series_log(mu, v)
    logB = (0.5 + mu) * np.log(v) + np.log(S) + scale
    dlog = (0.5 + mu) / v + dS / S
    return logB, dlog, cond


# ---------------------------------------------------------------------------
# small-ν system


def _exponential_pair_solution(nu: float, w0: float, w_hi: float):
    c = nu**2 + 0.25
    # B₁'' - B₁ = -(c/w²) B₁ with B₁ = e^{-w}(1 + b₁)
    tail = tuple(v[0] for v in lg_asymptotic([w_hi], c, 1.0))
    return solve(VolterraProblem("exponential", lambda y: -c / y**2 + 0j, (w0, w_hi), omega=1.0, tail=tail))


@dataclass
class SmallNuSystem:
    """Exponential pair B₁ = e^{-w}[1+b₁], B₂ = e^{w}[1+b₂] on [w₀, ∞) and
    the Bessel pair B_± = w^{1/2±iν}[1+b_±].

    `b1_solution` is the converged Volterra solution; B₂ is built from B₁
    by reduction of order,

        B₂ = 2B₁ [∫_{w₀}^{w} B₁^{-2} + e^{2w₀}/2],

    so that W(B₁, B₂) = 2 and B₂ = e^{w}(1 + b₂) with b₂ → 0 smoothly.
    """

    nu: float
    w0: float
    b1_solution: object
    w_hi: float
    _partner: tuple | None = None

    @property
    def c(self) -> float:
        return self.nu**2 + 0.25

    def _b1_pair(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        a = np.empty(w.shape, dtype=complex)
        ap = np.empty(w.shape, dtype=complex)
        far = w >= self.w_hi
        if np.any(far):
            a[far], ap[far] = lg_asymptotic(w[far], self.c, 1.0)
        if np.any(~far):
            a[~far] = self.b1_solution(w[~far])
            ap[~far] = self.b1_solution.derivative(w[~far])
        return a.real, ap.real

    def b1(self, w):
        return self._b1_pair(w)[0]

    def log_B1(self, w):
        """log B₁ and B₁'/B₁."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        if np.any(w < self.w0 * (1 - 1e-12)):
            raise ValueError(f"B₁ is tabulated for w ≥ {self.w0}")
        a, ap = self._b1_pair(w)
        return -w + np.log1p(a), -1.0 + ap / (1.0 + a)

    def _partner_table(self, w_max: float):
        if self._partner is None or self._partner[0].t_breaks[-1] < w_max:
            top = max(w_max, 2.0 * self.w0)
            brk = np.linspace(self.w0, top, int(math.ceil((top - self.w0) / 0.5)) + 1)
            mesh = build_mesh(brk, 16, None)
            a, _ = self._b1_pair(mesh.x)
            m, _ = scaled_cumulative(mesh, mesh.x, mesh.x_breaks, (1.0 + a) ** -2 - 1.0)
            self._partner = (mesh, m.real)
        return self._partner

    def log_B2(self, w):
        """log B₂ and B₂'/B₂ (B₂ grows like e^{w})."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        mesh, m = self._partner_table(float(np.max(w)))
        M = 0.5 + mesh.interpolate(m, w)
        a, ap = self._b1_pair(w)
        _, d1 = self.log_B1(w)
        return w + math.log(2.0) + np.log1p(a) + np.log(M), d1 + (1.0 + a) ** -2 / M

    def b2(self, w):
        L, _ = self.log_B2(w)
        return np.exp(L - np.asarray(w, dtype=float)) - 1.0

    def log_B_pm(self, w, sign: int):
        """log B_± and B_±'/B_± from the power series."""
        logB, dlog, _ = bessel_B(self.nu, w, sign)
        return logB, dlog

    def b_pm(self, w, sign: int):
        logB, _, _ = bessel_B(self.nu, w, sign)
        w = np.asarray(w, dtype=float)
        return np.exp(logB - (0.5 + sign * 1j * self.nu) * np.log(w)) - 1.0


def small_nu_system(nu: float, w0: float = 10.0, nu0: float = 5.0, w_hi: float = 40.0) -> SmallNuSystem:
    """Solve the b₁ Volterra equation on [w₀, ∞) (tail from its asymptotic series)."""
    if nu > nu0 + 1e-12:
        raise ValueError(f"nu={nu} exceeds the small-ν threshold {nu0}")
    X = max(w_hi, w0 + 1.0, 2.0 * (nu**2 + 0.25))
    return SmallNuSystem(nu, w0, _exponential_pair_solution(nu, w0, X), X)


def bessel_pair_wronskian(nu: float, sign: int) -> complex:
    """W(B_±, B₁) = -π^{-1/2} 2^{1/2±iν} Γ(1±iν)."""
    mu = sign * 1j * nu
    return complex(-np.exp((0.5 + mu) * math.log(2.0) + log_gamma(1.0 + mu)) / math.sqrt(math.pi))


# ---------------------------------------------------------------------------
# large-ν system


def large_nu_prefactor(nu: float) -> complex:
    """log of π^{-1/2} 2^{iν} e^{-i(ν+π/4)} ν^{-2/3+iν}, the constant taking
    ζ'^{1/2} B₋(νv) to the Ai - iBi normalised solution."""
    return complex(-0.5 * math.log(math.pi) + 1j * nu * math.log(2.0) - 1j * (nu + 0.25 * math.pi)
                   + (-2.0 / 3.0 + 1j * nu) * math.log(nu))


class LargeNuSystem:
    """Airy-type solutions of Φ'' = [ν²ζ + V₂(ζ)]Φ.

    φ₁ = Ai(X)[1 + a₁/ν], φ₂ = Bi(X)[1 + a₂/ν], φ_± = [Ai ± iBi](X)[1 + a_±/ν]
    with X = ν^{2/3}ζ.  Each correction is a converged Airy-kernel Volterra
    solution: a₁ based at +∞ (tail data from the exponential pair), a₂ at
    ζ = 0, a_± at -∞ (tail data from the Bessel power series).
    """

    def __init__(self, nu: float, zeta_max: float = 6.0, zeta_min: float = -6.0):
        from .lg import build_zeta, v2

        self.nu = float(nu)
        self.s = nu ** (2.0 / 3.0)
        self.zeta_map = build_zeta()
        self._v2 = v2
        self.zeta_max = zeta_max
        self.zeta_min = zeta_min
        self._sol = {}

    def V2(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        return self._v2(self.zeta_map, self.zeta_map.inverse(zeta))

    def _b(self, X):
        return self.V2(np.asarray(X) / self.s) / self.s**2 + 0j

    # exact representations through the Bessel functions of order iν

    def exact_log_minus(self, zeta):
        """log φ₋ and dlog φ₋/dζ from the power series of B₋."""
        zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
        v = self.zeta_map.inverse(zeta)
        d1 = self.zeta_map.derivs(v, 1)
        d2 = self.zeta_map.derivs(v, 2)
        logB, dlogB, _ = bessel_B(self.nu, self.nu * v, -1)
        L = large_nu_prefactor(self.nu) + 0.5 * np.log(d1) + logB
        dL = (0.5 * d2 / d1 + self.nu * dlogB) / d1
        return L, dL

    def exact_log_one(self, zeta):
        """log φ₁ and dlog φ₁/dζ from the decaying exponential pair (ζ large)."""
        zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
        v = self.zeta_map.inverse(zeta)
        sarg = self.nu * v
        c = self.nu**2 + 0.25
        if np.any(sarg < 2.0 * c):
            raise ValueError("exact φ₁ uses the asymptotic series; move further right")
        a, ap = lg_asymptotic(sarg, c, 1.0)
        a, ap = a.real, ap.real
        d1 = self.zeta_map.derivs(v, 1)
        d2 = self.zeta_map.derivs(v, 2)
        c1 = -math.log(2.0 * math.sqrt(math.pi)) - math.log(self.nu) / 6.0 + 0.5 * math.pi * self.nu
        L = c1 + 0.5 * np.log(d1) - sarg + np.log1p(a)
        dL = (0.5 * d2 / d1 - self.nu + self.nu * ap / (1.0 + a)) / d1
        return L, dL

    # Volterra solutions

    def _solution(self, key):
        if key in self._sol:
            return self._sol[key]
        if key == "one":
            c = self.nu**2 + 0.25
            v_r = (2.0 * c + 40.0) / self.nu
            zr = float(self.zeta_map(v_r)[0])
            Xr = self.s * zr
            L, dL = self.exact_log_one([zr])
            la = airy_log([Xr], "ai")[0]
            da = airy_log_derivative([Xr], "ai")[0]
            ph = np.exp(L[0] - la) - 1.0
            dph = (1.0 + ph) * (dL[0] / self.s - da)
            sol = solve(VolterraProblem("airy_decaying", self._b, (0.0, Xr), tail=(ph, dph)))
        elif key == "two":
            Xr = self.s * self.zeta_max
            sol = solve(VolterraProblem("airy_growing", self._b, (0.0, Xr), base="finite"))
        elif key == "minus":
            xl = -self.s * self.zeta_min
            L, dL = self.exact_log_minus([self.zeta_min])
            la = airy_log([-xl], "osc-")[0]
            da = airy_log_derivative([-xl], "osc-")[0]
            ph = np.exp(L[0] - la) - 1.0
            # variable x = -X
            dph = -(1.0 + ph) * (dL[0] / self.s - da)
            sol = solve(VolterraProblem("airy_oscillatory", lambda x: self._b(-np.asarray(x)), (0.0, xl),
                                        sign=-1, tail=(ph, dph)))
        else:
            raise KeyError(key)
        self._sol[key] = sol
        return sol

    def a(self, zeta, which: str):
        """a₁, a₂ (ζ ≥ 0) or a_± (ζ ≤ 0) with the ν⁻¹ scaling undone."""
        X = self.s * np.atleast_1d(np.asarray(zeta, dtype=float))
        if which in ("one", "two"):
            return self.nu * self._solution(which)(X)
        if which == "minus":
            return self.nu * self._solution("minus")(-X)
        if which == "plus":
            return np.conj(self.a(zeta, "minus"))
        raise KeyError(which)

    def log_phi(self, zeta, which: str):
        """log φ and dlog φ/dζ for which ∈ {'one', 'two', 'minus', 'plus'}."""
        zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
        X = self.s * zeta
        if which == "plus":
            L, dL = self.log_phi(zeta, "minus")
            return np.conj(L), np.conj(dL)
        kind = {"one": "ai", "two": "bi", "minus": "osc-"}[which]
        if which == "minus":
            sol = self._solution("minus")
            a, ap = sol(-X), -sol.derivative(-X)
        else:
            sol = self._solution(which)
            a, ap = sol(X), sol.derivative(X)
        L = airy_log(X, kind) + np.log(1.0 + a)
        dL = self.s * (airy_log_derivative(X, kind) + ap / (1.0 + a))
        return L, dL

    def connection(self, sign: int = -1):
        """(c₁, c₂) with φ_± = c₁ φ₁ + c₂ φ₂, from Wronskians at ζ = 0.

        c₁ = 1 + ν⁻¹α_{±,1} and c₂ = ±i(1 + ν⁻¹α_{±,2}).
        """
        z0 = np.array([0.0])
        which = "minus" if sign < 0 else "plus"
        Lm, dm = self.log_phi(z0, which)
        L1, d1 = self.log_phi(z0, "one")
        L2, d2 = self.log_phi(z0, "two")
        W12 = np.exp(L1 + L2) * (d2 - d1)
        c1 = np.exp(Lm + L2) * (d2 - dm) / W12
        c2 = np.exp(L1 + Lm) * (dm - d1) / W12
        return complex(c1[0]), complex(c2[0])


def large_nu_system(nu: float, nu1: float = 5.0, zeta_max: float = 6.0, zeta_min: float = -6.0) -> LargeNuSystem:
    if nu < nu1 - 1e-12:
        raise ValueError(f"nu={nu} is below the large-ν threshold {nu1}; use small_nu_system")
    return LargeNuSystem(nu, zeta_max, zeta_min)
