"""Semiclassical parameters and the potential models.

A potential is positive on the line and decays like e^{-|x|} on at least one
side.  On such a side it is written as

    V(x) = A e^{-|x|} [1 + ε(A e^{-|x|})],    ε(0) = 0,

where A is the leading tail amplitude.  Shifting x by log A turns this into
the normalised form e^{-x'}[1 + ε(e^{-x'})] used by the Bessel reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class DomainError(ValueError):
    pass


class SpecValidationError(ValueError):
    pass


class UnsupportedOrderError(ValueError):
    pass


class TurningPointError(ValueError):
    pass


@dataclass(frozen=True)
class SemiParams:
    E: float
    hbar: float
    alpha: float
    hbar1: float
    nu: float


def derive_params(E: float, hbar: float) -> SemiParams:
    """The parameter bundle (E, ħ, α, ħ₁, ν) with α = √(ħ²/4 + 4E²)."""
    if not (E > 0 and hbar > 0):
        raise DomainError("E and hbar must be positive")
    alpha = math.sqrt(0.25 * hbar * hbar + 4.0 * E * E)
    return SemiParams(E=E, hbar=hbar, alpha=alpha, hbar1=hbar / alpha, nu=2.0 * E / hbar)


# ---------------------------------------------------------------------------
# tortoise coordinate


def solve_tortoise_r(x):
    """r > 1 with x = r + log(r - 1), by Newton on t = log(r - 1).

    t + e^t = x - 1 is increasing and convex in t, so Newton started to the
    right of the root decreases monotonically onto it.
    """
    x = np.asarray(x, dtype=float)
    c = x - 1.0
    t = np.where(c > 1.0, np.log(np.maximum(c, 1.0)), c)
    for _ in range(100):
        et = np.exp(t)
        step = (t + et - c) / (1.0 + et)
        t = t - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(t))):
            break
    r = 1.0 + np.exp(t)
    return float(r) if r.ndim == 0 else r


# ---------------------------------------------------------------------------
# potentials


def _series_mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a, b)[:n]


def _tail_derivs(coef: np.ndarray, u: np.ndarray, k: int) -> np.ndarray:
    """k-th u-derivative of Σ coef[n] u^n."""
    c = np.asarray(coef, dtype=float)
    for _ in range(k):
        c = c[1:] * np.arange(1, len(c))
    if len(c) == 0:
        return np.zeros_like(u)
    return np.polynomial.polynomial.polyval(u, c)


def _x_derivs_of_tail(coef: np.ndarray, u: np.ndarray, k: int, sign: float) -> np.ndarray:
    """∂_x^k of Σ coef[n] e^{-sign·n·x} written in u = e^{-sign·x}."""
    n = np.arange(len(coef))
    return np.polynomial.polynomial.polyval(u, coef * (-sign * n) ** k)


@dataclass(frozen=True)
class PotentialSpec:
    """Two-sided potential with tail series and a core evaluator.

    tail_plus / tail_minus hold coefficients of V as a power series in
    u = e^{-|x|} (index n multiplies u^n, index 0 must vanish).  A side with
    no exponential tail carries None.  `core(x, k)` returns ∂_x^k V on the
    whole line.  `tail_exact` marks finite series that equal V everywhere on
    their side (so they may be used past the cutoff a).
    """

    family: str
    a: float
    core: Callable[[np.ndarray, int], np.ndarray]
    tail_plus: np.ndarray | None
    tail_minus: np.ndarray | None
    symmetric: bool
    K: int = 4
    tail_exact: bool = False
    params: dict = field(default_factory=dict)

    def tail(self, side: int) -> np.ndarray | None:
        return self.tail_plus if side > 0 else self.tail_minus

    def amplitude(self, side: int) -> float:
        c = self.tail(side)
        if c is None:
            raise SpecValidationError(f"{self.family}: no exponential tail on side {side:+d}")
        return float(c[1])

    def reflected(self) -> "PotentialSpec":
        core = self.core
        return PotentialSpec(
            family=self.family, a=self.a,
            core=lambda x, k=0: (-1.0) ** k * core(-np.asarray(x, dtype=float), k),
            tail_plus=self.tail_minus, tail_minus=self.tail_plus,
            symmetric=self.symmetric, K=self.K, tail_exact=self.tail_exact,
            params={**self.params, "reflected": not self.params.get("reflected", False)},
        )


def eval_potential(spec: PotentialSpec, x, k: int = 0):
    """∂_x^k V; tail series for |x| ≥ a, core evaluator otherwise."""
    if k > spec.K:
        raise UnsupportedOrderError(f"derivative order {k} exceeds K={spec.K}")
    x = np.asarray(x, dtype=float)
    out = np.asarray(spec.core(x, k), dtype=float).copy()
    for side in (1, -1):
        c = spec.tail(side)
        if c is None:
            continue
        sel = side * x >= spec.a
        if np.any(sel):
            u = np.exp(-np.abs(x[sel]))
            out[sel] = _x_derivs_of_tail(c, u, k, side)
    return float(out) if out.ndim == 0 else out


def tail_epsilon(spec: PotentialSpec, side: int, u, k: int = 0):
    """∂_u^k ε(u) for the normalised tail V = u'(1 + ε(u')), u' = A e^{-|x|}.

    Uses the tail series where it is valid (|x| ≥ a, or everywhere for exact
    finite tails) and the core evaluator beyond.
    """
    c = spec.tail(side)
    if c is None:
        raise SpecValidationError(f"{spec.family}: no exponential tail on side {side:+d}")
    A = float(c[1])
    # ε(u') = Σ_{n≥2} (c_n / A) (u'/A)^{n-1}
    n = np.arange(2, len(c))
    eps_coef = np.zeros(max(len(c) - 1, 1))
    if len(n):
        eps_coef[1:] = c[2:] / A / A ** (n - 1)
    u = np.asarray(u, dtype=float)
    out = _tail_derivs(eps_coef, u, k)
    if not spec.tail_exact:
        beyond = u > A * math.exp(-spec.a) * (1.0 + 1e-12)
        if np.any(beyond):
            out = np.array(out, dtype=float, copy=True)
            out[beyond] = _eps_from_core(spec, side, u[beyond], k, A)
    return float(out) if np.ndim(out) == 0 else out


def epsilon_coefficients(spec: PotentialSpec, side: int) -> np.ndarray:
    """Power-series coefficients of ε in the normalised variable u'."""
    c = spec.tail(side)
    A = float(c[1])
    n = np.arange(2, len(c))
    out = np.zeros(max(len(c) - 1, 1))
    if len(n):
        out[1:] = c[2:] / A / A ** (n - 1)
    return out


def tail_series_reach(spec: PotentialSpec, side: int) -> float:
    """Largest u' where the ε power series may be used."""
    if spec.tail_exact:
        return math.inf
    A = spec.amplitude(side)
    return A * spec.params.get("series_reach", math.exp(-spec.a))


def _eps_from_core(spec, side, up, k, A):
    # s = |x| with A e^{-s} = u'; d/du' = -(1/u') d/ds and d/ds = side·d/dx
    x = side * (np.log(A) - np.log(up))
    V = np.asarray(spec.core(x, 0), dtype=float)
    if k == 0:
        return V / up - 1.0
    Vs = side * np.asarray(spec.core(x, 1), dtype=float)
    Vu = -Vs / up
    if k == 1:
        return Vu / up - V / up**2
    if k == 2:
        Vss = np.asarray(spec.core(x, 2), dtype=float)
        Vuu = (Vss + Vs) / up**2
        return Vuu / up - 2.0 * Vu / up**2 + 2.0 * V / up**3
    raise UnsupportedOrderError("core-based ε derivatives implemented up to order 2")


def exponential_family(a: float = 1.0, coeffs=(), K: int = 4) -> PotentialSpec:
    """V(x) = e^{-|x|}(1 + Σ_n coeffs[n-1] e^{-n|x|}), symmetric."""
    tail = np.zeros(len(coeffs) + 2)
    tail[1] = 1.0
    tail[2:] = np.asarray(coeffs, dtype=float)

    def core(x, k=0):
        x = np.asarray(x, dtype=float)
        u = np.exp(-np.abs(x))
        sgn = np.where(x >= 0, 1.0, -1.0)
        out = np.zeros_like(u)
        for j in range(1, len(tail)):
            if tail[j] != 0.0:
                out = out + tail[j] * (-sgn * j) ** k * u**j
        return out

    fam = "exponential" if not any(coeffs) else "exp_tail"
    spec = PotentialSpec(
        family=fam, a=a, core=core, tail_plus=tail, tail_minus=tail.copy(),
        symmetric=True, K=K, tail_exact=True, params={"coeffs": tuple(float(c) for c in coeffs)},
    )
    _check_positive(spec)
    return spec


def _rw_q_coeffs(ell: int, sigma: float) -> np.ndarray:
    # V/(ℓ(ℓ+1)) as a polynomial in q = 1/r
    s = sigma / (ell * (ell + 1))
    return np.array([0.0, 0.0, 1.0, -1.0 + s, -s])


def _rw_core(qc: np.ndarray):
    def core(x, k=0):
        r = solve_tortoise_r(x)
        q = 1.0 / np.asarray(r, dtype=float)
        c = qc.copy()
        for _ in range(k):
            # d/dx = (1 - q) d/dr and d/dr q^j = -j q^{j+1}
            d = np.zeros(len(c) + 2)
            for j, cj in enumerate(c):
                if cj == 0.0 or j == 0:
                    continue
                d[j + 1] += -j * cj
                d[j + 2] += j * cj
            c = d
        return np.polynomial.polynomial.polyval(q, c)

    return core


def _rw_left_tail(qc: np.ndarray, order: int) -> np.ndarray:
    # r - 1 = W(u/e) = Σ (-n)^{n-1}/n! (u/e)^n with u = e^{x}
    n = np.arange(order + 1)
    s = np.zeros(order + 1)
    for m in range(1, order + 1):
        s[m] = math.exp((m - 1) * math.log(m) - math.lgamma(m + 1) - m) * (-1.0) ** (m - 1)
    # q = 1/(1+s) as a series
    one_s = s.copy()
    one_s[0] = 1.0
    q = np.zeros(order + 1)
    q[0] = 1.0
    for m in range(1, order + 1):
        q[m] = -np.dot(one_s[1 : m + 1], q[m - 1 :: -1][:m])
    out = np.zeros(order + 1)
    power = np.zeros(order + 1)
    power[0] = 1.0
    for j, cj in enumerate(qc):
        if j > 0:
            power = _series_mul(power, q, order + 1)
        if cj != 0.0:
            out += cj * power
    out[0] = 0.0
    del n
    return out


def regge_wheeler(ell: int, sigma: float = 0.0, a: float = 1.0, order: int = 64, K: int = 4) -> PotentialSpec:
    """Regge-Wheeler potential divided by ℓ(ℓ+1).

    The overall scale ħ_RW² = 1/(ℓ(ℓ+1)) is removed so the semiclassical
    parameter can be chosen freely; the left tail is the convergent e^{x}
    series and the right side decays like an inverse square (no tail).
    """
    if ell < 1:
        raise SpecValidationError("Regge-Wheeler family needs ell >= 1")
    if sigma not in (-3.0, 0.0, 1.0):
        raise SpecValidationError("sigma must be one of -3, 0, 1")
    qc = _rw_q_coeffs(ell, float(sigma))
    spec = PotentialSpec(
        family="regge_wheeler", a=a, core=_rw_core(qc),
        tail_plus=None, tail_minus=_rw_left_tail(qc, order),
        symmetric=False, K=K, tail_exact=False,
        params={"ell": ell, "sigma": float(sigma), "order": order, "series_reach": math.exp(-0.5),
                "far_field": "tortoise", "q_coeffs": tuple(qc)},
    )
    _check_positive(spec)
    return spec


def far_field_data(spec: PotentialSpec):
    """Power-law side in the variable q: (V coefficients in q, dq/dx coefficients, x(q)).

    Only the tortoise coordinate q = 1/r is supported, with dq/dx = -q²(1 - q).
    """
    if spec.params.get("far_field") != "tortoise":
        raise SpecValidationError(f"{spec.family}: no far-field description")
    return np.asarray(spec.params["q_coeffs"]), np.array([0.0, 0.0, -1.0, 1.0]), _tortoise_x_of_q


def _tortoise_x_of_q(q: float) -> float:
    r = 1.0 / q
    return r + math.log(r - 1.0)


def free_potential() -> PotentialSpec:
    """V ≡ 0; used only for anchors (it is not positive)."""
    zero = np.zeros(2)
    return PotentialSpec(
        family="free", a=1.0, core=lambda x, k=0: np.zeros(np.shape(x)),
        tail_plus=zero, tail_minus=zero, symmetric=True, K=8, tail_exact=True,
    )


def _check_positive(spec: PotentialSpec, lo: float = -50.0, hi: float = 50.0, n: int = 1000) -> None:
    x = np.linspace(lo, hi, n)
    v = eval_potential(spec, x)
    if np.any(v <= 0):
        raise SpecValidationError(f"{spec.family}: potential not positive on the sampled grid")


def validate_spec(spec: PotentialSpec, tol: float = 1e-10) -> None:
    """Tail/core consistency at ±a, ε > -1 on the tails, positivity."""
    if spec.family == "free":
        return
    if spec.a < 0.25:
        raise SpecValidationError(f"cutoff a={spec.a} too small for the tail series")
    for side in (1, -1):
        c = spec.tail(side)
        if c is None:
            continue
        if abs(c[0]) > 0 or c[1] <= 0:
            raise SpecValidationError("tail series must start with a positive linear term")
        xa = side * spec.a
        for k in range(min(spec.K, 2) + 1):
            vt = _x_derivs_of_tail(c, np.array([math.exp(-spec.a)]), k, side)[0]
            vc = float(spec.core(np.array([xa]), k)[0])
            if abs(vt - vc) > tol * max(1.0, abs(vc)) * 10 ** k:
                raise SpecValidationError(f"tail and core disagree at x={xa} (order {k}): {vt} vs {vc}")
        u = np.linspace(1e-6, spec.amplitude(side) * math.exp(-spec.a), 50)
        if np.any(tail_epsilon(spec, side, u) <= -1):
            raise SpecValidationError("tail ε must exceed -1")
    _check_positive(spec)


def turning_points(spec: PotentialSpec, params: SemiParams, span: float = 80.0) -> tuple[float, float]:
    """Roots of V(x) = E² on each side of the potential maximum."""
    E2 = params.E**2
    x = np.linspace(-span, span, 16001)
    v = eval_potential(spec, x)
    top = int(np.argmax(v))
    if v[top] <= E2:
        raise TurningPointError("E² exceeds the barrier maximum")
    roots = []
    for rng in (range(top, 0, -1), range(top, len(x) - 1)):
        idx = None
        for i in rng:
            j = i - 1 if rng.step < 0 else i + 1
            if (v[i] - E2) * (v[j] - E2) <= 0:
                idx = (min(i, j), max(i, j))
                break
        if idx is not None:
            roots.append(_bracketed_newton(spec, E2, x[idx[0]], x[idx[1]]))
            continue
        # slowly decaying side: widen geometrically past the scan window
        sgn = -1.0 if rng.step < 0 else 1.0
        prev, far = span, 2.0 * span
        while far < 1e9 and eval_potential(spec, sgn * far) - E2 > 0:
            prev, far = far, 2.0 * far
        if far >= 1e9:
            raise TurningPointError("no sign change of V - E² found")
        roots.append(_bracketed_newton(spec, E2, sgn * prev, sgn * far))
    for xt in roots:
        h = max(1e-3 * abs(xt), 1e-5)
        dv = (eval_potential(spec, xt + h) - eval_potential(spec, xt - h)) / (2 * h)
        if abs(dv) < 1e-3 * E2 / math.sqrt(1 + xt * xt):
            raise TurningPointError(f"degenerate turning point at x={xt}")
    return roots[0], roots[1]


def _bracketed_newton(spec, E2, lo, hi, tol=1e-12):
    flo = eval_potential(spec, lo) - E2
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = eval_potential(spec, x) - E2
        if f == 0:
            return x
        if (f > 0) == (flo > 0):
            lo, flo = x, f
        else:
            hi = x
        d = eval_potential(spec, x, 1)
        xn = x - f / d if d != 0 else 0.5 * (lo + hi)
        if not (min(lo, hi) < xn < max(lo, hi)):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) < tol:
            return xn
        x = xn
    return x
