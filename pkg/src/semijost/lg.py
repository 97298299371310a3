"""Liouville-Green maps for the perturbed Bessel equation.

The model map ζ solves ζ'(x)² ζ(x) = 1 - 1/x² with ζ(1) = 0.  For a tail
perturbation ε the rescaled equation reads

    ħ₁² g''(z) = Q(z) g(z),    Q(z) = 1 - 1/z² + ε(α² z²/4),

and φ = ζ⁻¹∘τ straightens it onto the Bessel model.  Away from the turning
point φ comes from the phase integrals and closed-form antiderivatives; in a
window around it both τ and ζ are expanded as power series (they are
analytic there), so φ and its first three derivatives are polynomials in
z - z_t.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .params import DomainError, PotentialSpec, SemiParams, SpecValidationError, TurningPointError
from .params import epsilon_coefficients, tail_epsilon, tail_series_reach
from .quadrature import build_mesh, gauss_legendre, integration_matrix

SERIES_DEGREE = 30
WINDOW = 0.2
ZETA_WINDOW = 0.1
MIN_WINDOW = 0.03

# ---------------------------------------------------------------------------
# truncated power series (coefficient arrays, index = power)


def series_mul(a, b, n: int = SERIES_DEGREE + 1):
    return np.convolve(a[:n], b[:n])[:n]


def series_pow(a, p: float, n: int = SERIES_DEGREE + 1):
    """a(s)^p for a[0] > 0 (J.C.P. Miller recurrence)."""
    a = np.asarray(a, dtype=float)[:n]
    a = np.concatenate([a, np.zeros(max(0, n - len(a)))])
    b = np.zeros(n)
    b[0] = a[0] ** p
    for m in range(1, n):
        k = np.arange(1, m + 1)
        b[m] = np.sum((k * (p + 1) - m) * a[k] * b[m - k]) / (m * a[0])
    return b


def series_compose(outer, inner, n: int = SERIES_DEGREE + 1):
    """outer(inner(s)) with inner[0] = 0."""
    out = np.zeros(n)
    out[0] = outer[0]
    power = np.zeros(n)
    power[0] = 1.0
    for k in range(1, min(len(outer), n)):
        power = series_mul(power, inner, n)
        out += outer[k] * power
    return out


def series_revert(a, n: int = SERIES_DEGREE + 1):
    """Inverse series of y = Σ_{k≥1} a_k x^k."""
    b = np.zeros(n)
    b[1] = 1.0 / a[1]
    for m in range(2, n):
        comp = series_compose(np.concatenate([[0.0], a[1:n]]), b, m + 1)
        b[m] = -comp[m] / a[1]
    return b


def _turning_series(q, n: int = SERIES_DEGREE + 1):
    """Given Q(s) = Σ q_k s^k with q_0 = 0 < q_1, return h with

        sign(s) |(3/2) ∫_0^s √|Q||^{2/3} = s·h(s).
    """
    R = np.asarray(q[1 : n + 1], dtype=float)
    r = series_pow(R, 0.5, n)
    k = np.arange(n)
    H = 1.5 * r / (k + 1.5)
    return series_pow(H, 2.0 / 3.0, n)


def _poly_eval(c, s, d: int = 0):
    """Value of the d-th derivative of Σ c_k s^k."""
    c = np.asarray(c, dtype=float)
    for _ in range(d):
        c = c[1:] * np.arange(1, len(c))
    return np.polynomial.polynomial.polyval(s, c)


# ---------------------------------------------------------------------------
# model map ζ


def _model_g(x, k: int = 0):
    x = np.asarray(x, dtype=float)
    if k == 0:
        return 1.0 - x**-2
    if k == 1:
        return 2.0 * x**-3
    if k == 2:
        return -6.0 * x**-4
    return 24.0 * x**-5


def _left_primitive(x):
    """N(x) = ∫_x^1 √(1-u²)/u du for 0 < x < 1."""
    r = np.sqrt(1.0 - x * x)
    return -np.log(x) - r + np.log1p(r)


def _right_primitive(x):
    """M(x) = ∫_1^x √(1-1/u²) du for x > 1."""
    return np.sqrt(x * x - 1.0) - np.arccos(1.0 / x)


@lru_cache(maxsize=1)
def _zeta_series():
    """ζ(1+y) = Σ c_k y^k and its reversion."""
    n = SERIES_DEGREE + 1
    k = np.arange(n + 1)
    q = -((k + 1) * (-1.0) ** k)  # -(1+y)^{-2}
    q[0] += 1.0
    h = _turning_series(q, n)
    zs = np.concatenate([[0.0], h[: n - 1]])
    return zs, series_revert(zs, n)


@dataclass(frozen=True)
class ZetaMap:
    """ζ on (0, ∞), its first three derivatives, and ζ⁻¹ on ℝ."""

    series: np.ndarray
    inverse_series: np.ndarray

    def __call__(self, x):
        return self.derivs(x, 0)

    def derivs(self, x, k: int = 0):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x <= 0):
            raise DomainError("ζ is defined for x > 0")
        out = np.empty_like(x)
        near = np.abs(x - 1.0) < ZETA_WINDOW
        if np.any(near):
            out[near] = _poly_eval(self.series, x[near] - 1.0, k)
        far = ~near
        if np.any(far):
            xf = x[far]
            z = np.where(xf < 1, -(1.5 * _left_primitive(np.minimum(xf, 1 - 1e-300))) ** (2 / 3),
                         (1.5 * _right_primitive(np.maximum(xf, 1.0))) ** (2 / 3))
            if k == 0:
                out[far] = z
            else:
                g, g1, g2 = _model_g(xf), _model_g(xf, 1), _model_g(xf, 2)
                d1 = np.sqrt(g / z)
                d2 = (g1 - d1**3) / (2 * z * d1)
                if k == 1:
                    out[far] = d1
                elif k == 2:
                    out[far] = d2
                elif k == 3:
                    out[far] = (g2 - 5 * d1**2 * d2 - 2 * z * d2**2) / (2 * z * d1)
                else:
                    raise ValueError("derivatives up to order 3")
        return out

    def inverse(self, y, tol: float = 1e-15):
        """ζ⁻¹(y) by Newton in log x (series near 0)."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty_like(y)
        small = np.abs(y) < 0.08
        if np.any(small):
            out[small] = 1.0 + _poly_eval(self.inverse_series, y[small])
        big = ~small
        if np.any(big):
            yb = y[big]
            neg = yb < 0
            target = (2.0 / 3.0) * np.abs(yb) ** 1.5
            # left: N(x) = target ; right: M(x) = target
            lx = np.where(neg, math.log(2) - 1 - target, np.log(np.maximum(target + 0.5 * math.pi, 1.0 + 1e-3)))
            lx = np.where(neg, np.minimum(lx, math.log(0.95)), lx)
            for _ in range(100):
                x = np.exp(lx)
                with np.errstate(invalid="ignore"):
                    r = np.sqrt(np.abs(1.0 - x * x))
                    F = np.where(neg, _left_primitive(np.minimum(x, 1 - 1e-16)) - target,
                                 _right_primitive(np.maximum(x, 1 + 1e-16)) - target)
                    dF = np.where(neg, -r, r)
                step = F / dF
                step = np.clip(step, -1.0, 1.0)
                lx = lx - step
                lx = np.where(neg, np.minimum(lx, -1e-12), np.maximum(lx, 1e-12))
                if np.all(np.abs(step) < tol):
                    break
            out[big] = np.exp(lx)
        return out


def build_zeta() -> ZetaMap:
    s, inv = _zeta_series()
    return ZetaMap(s, inv)


# ---------------------------------------------------------------------------
# the normalising map φ


@dataclass
class LGMap:
    """Tabulated map φ = ζ⁻¹∘τ on (0, z_end] for one side of one potential.

    z_e is the image of the physical origin; `log_c` is log lim φ(z)/z.
    """

    alpha: float
    hbar1: float
    z_t: float
    z_e: float
    z_end: float
    z_a: float
    z_b: float
    win: np.ndarray
    log_c: float
    eps_fn: object
    _left: tuple = field(repr=False)
    _right: tuple = field(repr=False)

    @property
    def alpha2(self) -> float:
        return self.alpha**2

    @property
    def w0(self) -> float:
        return float(self.phi(self.z_end)[0])

    def Q(self, z, k: int = 0):
        z = np.asarray(z, dtype=float)
        u = 0.25 * self.alpha2 * z * z
        if k == 0:
            return 1.0 - z**-2 + self.eps_fn(u, 0)
        if k == 1:
            return 2.0 * z**-3 + self.eps_fn(u, 1) * 0.5 * self.alpha2 * z
        return -6.0 * z**-4 + self.eps_fn(u, 2) * (0.5 * self.alpha2 * z) ** 2 + self.eps_fn(u, 1) * 0.5 * self.alpha2

    def _cumulative(self, table, z):
        mesh, vals = table[0], table[1]
        return mesh.interpolate(vals, np.log(z))

    def phi_derivs(self, z):
        """φ, φ', φ'', φ''' at z (arrays)."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if np.any(z <= 0) or np.any(z > self.z_end * (1 + 1e-12)):
            raise DomainError("z outside (0, z_end]")
        out = np.empty((4,) + z.shape)
        win = (z >= self.z_a) & (z <= self.z_b)
        if np.any(win):
            s = z[win] - self.z_t
            for d in range(4):
                out[d, win] = _poly_eval(self.win, s, d)
        left = z < self.z_a
        if np.any(left):
            zl = z[left]
            tmin = self._left[0].t_breaks[0]
            J = self._cumulative(self._left, np.maximum(zl, math.exp(tmin)))
            rhs = np.log(zl) - math.log(self.z_a) - self._left[2] - J
            out[0, left] = _solve_left(rhs)
        right = z > self.z_b
        if np.any(right):
            zr = z[right]
            T = self._right[2] + self._cumulative(self._right, zr)
            out[0, right] = _solve_right(T)
        far = ~win
        if np.any(far):
            zf = z[far]
            p = out[0, far]
            Q, Q1, Q2 = self.Q(zf), self.Q(zf, 1), self.Q(zf, 2)
            g, g1, g2 = _model_g(p), _model_g(p, 1), _model_g(p, 2)
            d1 = np.sqrt(Q / g)
            d2 = (Q1 - g1 * d1**3) / (2 * g * d1)
            d3 = (Q2 - g2 * d1**4 - 5 * g1 * d1**2 * d2 - 2 * g * d2**2) / (2 * g * d1)
            out[1, far], out[2, far], out[3, far] = d1, d2, d3
        return out

    def phi(self, z):
        return self.phi_derivs(z)[0]

    def tau(self, z):
        """Phase variable τ = ζ(φ(z)), signed like z - z_t."""
        return build_zeta()(self.phi(z))

    def schwarzian(self, z):
        """S = ¾φ''²/φ'⁴ - ½φ'''/φ'³ (so that ħ₁²S is the normal-form perturbation)."""
        _, d1, d2, d3 = self.phi_derivs(z)
        return 0.75 * d2**2 / d1**4 - 0.5 * d3 / d1**3

    def V1_at_z(self, z):
        return self.schwarzian(z) / self.alpha2

    def eps2(self, z):
        z = np.asarray(z, dtype=float)
        return (self.phi(z) / z - 1.0) / (self.alpha2 * z * z)

    def inverse(self, w, tol: float = 1e-14):
        """z with φ(z) = w (Newton, safeguarded by bisection)."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        lo = np.full(w.shape, 1e-300)
        hi = np.full(w.shape, self.z_end)
        z = np.clip(w * math.exp(-self.log_c), 1e-300, self.z_end)
        for _ in range(200):
            f, d1 = self.phi_derivs(z)[:2]
            r = f - w
            lo = np.where(r < 0, z, lo)
            hi = np.where(r >= 0, z, hi)
            zn = z - r / d1
            bad = (zn <= lo) | (zn >= hi)
            zn = np.where(bad, 0.5 * (lo + hi), zn)
            if np.all(np.abs(zn - z) <= tol * z):
                z = zn
                break
            z = zn
        return z

    def dump_csv(self, path, n: int = 400):
        z = np.exp(np.linspace(math.log(self.z_end) - 12.0, math.log(self.z_end), n))
        d = self.phi_derivs(z)
        tau = build_zeta()(d[0])
        V1 = self.V1_at_z(z)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["z", "tau", "phi", "phi_prime", "V1"])
            for row in zip(z, tau, d[0], d[1], V1):
                wr.writerow([f"{v:.17g}" for v in row])


def _solve_left(rhs):
    """x in (0,1) with log x + √(1-x²) - log(1+√(1-x²)) = rhs."""
    lx = np.minimum(rhs - 1.0 + math.log(2.0), math.log(0.99))
    for _ in range(100):
        x = np.exp(lx)
        r = np.sqrt(1.0 - x * x)
        F = -_left_primitive(x) - rhs
        step = np.clip(F / r, -1.0, 1.0)
        lx = np.minimum(lx - step, -1e-12)
        if np.all(np.abs(step) < 1e-15):
            break
    return np.exp(lx)


def _solve_right(T):
    """x > 1 with √(x²-1) - arccos(1/x) = T."""
    x = np.maximum(T + 0.5 * math.pi, 1.05)
    for _ in range(100):
        F = _right_primitive(x) - T
        dF = np.sqrt(x * x - 1.0) / x
        xn = np.maximum(x - F / dF, 1.0 + 0.5 * (x - 1.0))
        if np.all(np.abs(xn - x) <= 1e-15 * x):
            x = xn
            break
        x = xn
    return x


def _graded(t0, t1, width, toward_right: bool):
    # geometric refinement towards the end nearest the turning point
    steps = [min(width, 0.02 * 1.6**k) for k in range(40)]
    out, acc = [0.0], 0.0
    for h in steps + [width] * int(math.ceil((t1 - t0) / width) + 1):
        acc += h
        if acc >= t1 - t0 - 0.25 * h:
            break
        out.append(acc)
    out.append(t1 - t0)
    d = np.array(out)
    return t1 - d[::-1] if toward_right else t0 + d


def _cumulative_table(t0, t1, integrand, width, from_right: bool, p: int = 16):
    brk = _graded(t0, t1, width, from_right)
    mesh = build_mesh(brk, p, None)
    f = integrand(mesh.x)
    S = integration_matrix(p)
    _, w = gauss_legendre(p)
    half = mesh.half[:, None]
    loc = (f @ S.T) * half  # ∫ from panel start
    tot = (f @ w) * mesh.half
    start = np.concatenate([[0.0], np.cumsum(tot)])
    cum = start[:-1, None] + loc
    if from_right:
        cum = start[-1] - cum
    return mesh, cum


def _epsilon_taylor(coef, u_t, n):
    """Taylor coefficients of ε about u_t from its power series."""
    j = np.arange(len(coef))
    out = np.zeros(n)
    for m in range(min(n, len(coef))):
        sel = j >= m
        binom = np.array([math.comb(int(jj), m) for jj in j[sel]], dtype=float)
        out[m] = np.sum(coef[sel] * binom * u_t ** (j[sel] - m))
    return out


def build_lg_map(spec: PotentialSpec, params: SemiParams, side: int = 1, *,
                 alpha_max: float = 0.7, x_eval: float = 0.0, buffer: float = 0.5) -> LGMap:
    """Liouville-Green map for f_± on the given side.

    `x_eval` is the physical abscissa where boundary data are wanted (x ≥ 0
    on the + side, mirrored for the - side); the map extends `buffer`
    beyond it towards the core so reduction integrals have room.
    """
    if params.alpha > alpha_max:
        raise DomainError(f"alpha={params.alpha:.4g} exceeds alpha_max={alpha_max}")
    c = spec.tail(side)
    if c is None:
        raise SpecValidationError(f"{spec.family}: side {side:+d} has no exponential tail")
    A = spec.amplitude(side)
    alpha = params.alpha
    eps_fn = lambda u, k=0: tail_epsilon(spec, side, u, k)  # noqa: E731
    xe = x_eval - math.log(A)
    z_e = 2.0 / alpha * math.exp(-0.5 * xe)
    z_end = 2.0 / alpha * math.exp(-0.5 * (xe - buffer))
    a2 = alpha * alpha

    def Q(z, k=0):
        u = 0.25 * a2 * z * z
        if k == 0:
            return 1.0 - z**-2 + eps_fn(u, 0)
        return 2.0 * z**-3 + eps_fn(u, 1) * 0.5 * a2 * z

    # turning point
    if Q(z_end) <= 0:
        raise TurningPointError("no turning point inside the Liouville-Green domain")
    lo, hi = 1e-3, z_end
    z = 1.0 if Q(1.0) * 0 == 0 else 1.0
    for _ in range(200):
        f = Q(z)
        if f < 0:
            lo = z
        else:
            hi = z
        zn = z - f / Q(z, 1)
        if not (lo < zn < hi):
            zn = 0.5 * (lo + hi)
        if abs(zn - z) < 1e-15 * z:
            z = zn
            break
        z = zn
    z_t = z
    if Q(z_t, 1) <= 0:
        raise TurningPointError("degenerate turning point")
    reach = tail_series_reach(spec, side)
    z_reach = 2.0 / alpha * math.sqrt(reach) if math.isfinite(reach) else math.inf
    delta = min(WINDOW, 0.5 * z_t, 0.5 * (z_end - z_t), 0.999 * (z_reach - z_t))
    if delta < MIN_WINDOW:
        raise DomainError("turning point too close to the tail series reach or the domain end; lower alpha")
    z_a, z_b = z_t - delta, z_t + delta

    # window series
    n = SERIES_DEGREE + 1
    ecoef = epsilon_coefficients(spec, side)
    u_t = 0.25 * a2 * z_t**2
    k = np.arange(n + 1)
    q = -(k + 1) * (-1.0 / z_t) ** k / z_t**2
    q[0] += 1.0
    et = _epsilon_taylor(ecoef, u_t, n + 1)
    du = np.zeros(n + 1)
    du[1] = 0.5 * a2 * z_t
    du[2] = 0.25 * a2
    q = q + series_compose(et, du, n + 1)
    q[0] = 0.0
    h = _turning_series(q, n)
    tau = np.concatenate([[0.0], h[: n - 1]])
    _, inv = _zeta_series()
    win = series_compose(inv, tau, n)
    win[0] += 1.0

    # left table: J(z) = ∫_z^{z_a} (√(1 - u²(1+ε)) - 1)/u du in t = log u
    def left_integrand(t):
        u = np.exp(t)
        return np.sqrt(1.0 - u * u * (1.0 + eps_fn(0.25 * a2 * u * u))) - 1.0

    t_min = -40.0
    lm, lvals = _cumulative_table(t_min, math.log(z_a), left_integrand, 0.5, True)
    tau_a = _poly_eval(tau, -delta)
    N_a = (2.0 / 3.0) * (-tau_a) ** 1.5
    J0 = float(lvals[0, 0]) if False else float(lm.interpolate(lvals, np.array([t_min]))[0])
    log_c = math.log(2.0) - 1.0 - math.log(z_a) - N_a - J0

    def right_integrand(t):
        u = np.exp(t)
        return np.sqrt(Q(u)) * u

    t_b, t_end = math.log(z_b), math.log(z_end)
    rm, rvals = _cumulative_table(t_b, max(t_end, t_b + 1e-9), right_integrand, 0.05, False)
    tau_b = _poly_eval(tau, delta)
    T_b = (2.0 / 3.0) * tau_b**1.5
    return LGMap(alpha, params.hbar1, z_t, z_e, z_end, z_a, z_b, win, log_c, eps_fn,
                 (lm, lvals, N_a), (rm, rvals, T_b))


def normal_form_V1(lg: LGMap, w) -> np.ndarray:
    """Normal-form potential V₁(w) = (ħ₁/ħ)² S(φ⁻¹(w)) for w in (0, w₀)."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w <= 0) or np.any(w >= lg.w0):
        raise DomainError(f"w must lie in (0, {lg.w0:.6g})")
    return lg.V1_at_z(lg.inverse(w))


# ---------------------------------------------------------------------------
# large-ν transform


@lru_cache(maxsize=1)
def _v2_series():
    """Series of V₂(ζ(1+y)) in y; the poles at y = 0 cancel."""
    n = SERIES_DEGREE + 1
    zs, _ = _zeta_series()
    kser = zs[1:]  # ζ = y·k(y)
    inv_k2 = series_pow(kser, -2.0, n)
    first = 5.0 / 16.0 * inv_k2
    one_y_sq = np.zeros(n)
    one_y_sq[:3] = [1.0, 2.0, 1.0]
    five = np.zeros(n)
    five[:3] = [5.0, 2.0, 1.0]
    two_y = np.zeros(n)
    two_y[:2] = [2.0, 1.0]
    inv_two = series_pow(two_y, -3.0, n)
    second = series_mul(series_mul(series_mul(kser, one_y_sq, n), five, n), inv_two, n) / 4.0
    num = first - second
    return num[2:]


def v2(zeta_map: ZetaMap, x):
    """V₂ at ζ = ζ(x): 5/(16ζ²) + ζx²(4+x²)/(4(1-x²)³), series across x = 1."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    near = np.abs(x - 1.0) < ZETA_WINDOW
    if np.any(near):
        out[near] = _poly_eval(_v2_series(), x[near] - 1.0)
    far = ~near
    if np.any(far):
        xf = x[far]
        assert np.all(np.abs(xf - 1.0) >= 1e-3)
        z = zeta_map(xf)
        out[far] = 5.0 / (16.0 * z * z) + z * xf**2 * (4 + xf**2) / (4 * (1 - xf**2) ** 3)
    return out


@dataclass(frozen=True)
class LargeNuTransform:
    lg: LGMap
    nu: float
    zeta0: float
    zeta_map: ZetaMap

    @property
    def scale(self) -> float:
        """ħ₁ν, the factor between w and v."""
        return self.lg.hbar1 * self.nu

    def v_of_z(self, z):
        return self.lg.phi(z) / self.scale

    def V2(self, zeta):
        x = self.zeta_map.inverse(zeta)
        return v2(self.zeta_map, x)

    def V3_at_z(self, z):
        """V₃ at ζ(v(z)) = ζ'(v)^{-2} Ṽ₁(v),  Ṽ₁ = (ħ₁ν)² V₁."""
        v = self.v_of_z(z)
        zp = self.zeta_map.derivs(v, 1)
        return self.scale**2 * self.lg.V1_at_z(z) / zp**2

    def V3(self, zeta):
        v = self.zeta_map.inverse(zeta)
        z = self.lg.inverse(v * self.scale)
        return self.V3_at_z(z)


def large_nu_transform(lg: LGMap, params: SemiParams) -> LargeNuTransform:
    zm = build_zeta()
    nu = params.nu
    zeta0 = float(zm(lg.w0 / (lg.hbar1 * nu))[0])
    return LargeNuTransform(lg, nu, zeta0, zm)


# ---------------------------------------------------------------------------
# symbol classes


def _fd_weights(k: int, m: int = 4) -> np.ndarray:
    offs = np.arange(-m, m + 1, dtype=float)
    A = np.vander(offs, increasing=True).T
    rhs = np.zeros(len(offs))
    rhs[k] = math.factorial(k)
    return np.linalg.solve(A, rhs)


@dataclass
class SymbolReport:
    alpha: float
    constants: list
    slopes: list
    passed: list
    inconclusive: list

    @property
    def ok(self) -> bool:
        return all(p or i for p, i in zip(self.passed, self.inconclusive))


def symbol_class_check(f, alpha: float, interval, K: int = 3, n_blocks: int = 12,
                       per_block: int = 24, tol: float = 0.25) -> SymbolReport:
    """Empirical test of |f^(k)(x)| ≤ C_k |x|^{α-k} on a positive interval.

    Derivatives use 9-point central differences with h = max(1e-3|x|, 1e-5).
    Per dyadic-ish block the sup of |f^(k)| is taken; the log-log slope of
    these sups against x must not exceed α - k by more than `tol`.
    """
    lo, hi = interval
    edges = np.exp(np.linspace(math.log(lo), math.log(hi), n_blocks + 1))
    consts, slopes, passed, inconc = [], [], [], []
    for k in range(K + 1):
        wts = _fd_weights(k) if k else None
        xs_all, sups = [], []
        noisy = False
        for b in range(n_blocks):
            xs = np.exp(np.linspace(math.log(edges[b]), math.log(edges[b + 1]), per_block))
            if k == 0:
                vals = np.abs(np.asarray(f(xs), dtype=float))
                noise = np.zeros_like(vals)
            else:
                h = np.maximum(1e-3 * xs, 1e-5)
                offs = np.arange(-4, 5)
                pts = xs[:, None] + offs[None, :] * h[:, None]
                fv = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
                vals = np.abs(fv @ wts) / h**k
                noise = 1e-15 * np.max(np.abs(fv), axis=1) * np.sum(np.abs(wts)) / h**k
            i = int(np.argmax(vals))
            sups.append(vals[i])
            xs_all.append(xs[i])
            if vals[i] <= 10 * noise[i]:
                noisy = True
        xs_all = np.array(xs_all)
        sups = np.array(sups)
        consts.append(float(np.max(sups * xs_all ** (k - alpha))))
        good = sups > 0
        slope = float(np.polyfit(np.log(xs_all[good]), np.log(sups[good]), 1)[0]) if good.sum() >= 2 else float("nan")
        slopes.append(slope)
        passed.append(bool(slope <= alpha - k + tol))
        inconc.append(noisy and not passed[-1])
    return SymbolReport(alpha, consts, slopes, passed, inconc)
