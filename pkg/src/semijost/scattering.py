"""Scattering data from Jost boundary values at x = 0.

Everything consumes objects with Scaled `f` and `f_prime` fields, so the
oracle and the Liouville-Green pipeline feed the same formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .params import PotentialSpec, SemiParams, eval_potential, turning_points
from .scaled import Scaled


class SingularWronskianError(ArithmeticError):
    pass


class FitError(ValueError):
    pass


class PrecisionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ScatteringResult:
    t: Scaled
    r: complex
    W_mp: Scaled
    W_conj: Scaled
    unitarity_defect: float
    e_00: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def log10_abs_t(self) -> float:
        return self.t.log10_abs()


@dataclass(frozen=True)
class ExponentFit:
    S_fit: float
    S_wkb: float
    S_tilde_fit: float
    slope_error: float
    r2: float
    r2_tilde: float


def _cancellation(result: Scaled, a: Scaled, b: Scaled) -> bool:
    scale = max(a.log_abs(), b.log_abs())
    return result.log_abs() < scale + math.log(1e-8)


def wronskians(jb_minus, jb_plus) -> tuple[Scaled, Scaled, tuple[str, ...]]:
    """W(f₋, f₊) and W(conj f₋, f₊) at x = 0, with precision notes."""
    a = jb_minus.f * jb_plus.f_prime
    b = jb_minus.f_prime * jb_plus.f
    W = a - b
    ac = jb_minus.f.conj() * jb_plus.f_prime
    bc = jb_minus.f_prime.conj() * jb_plus.f
    Wc = ac - bc
    notes = []
    if _cancellation(W, a, b):
        notes.append("cancellation in W(f-,f+)")
    if _cancellation(Wc, ac, bc):
        notes.append("cancellation in W(conj f-,f+)")
    for n in notes:
        warnings.warn(n, PrecisionWarning, stacklevel=2)
    return W, Wc, tuple(notes)


def amplitudes(W_mp: Scaled, W_conj: Scaled, params: SemiParams) -> tuple[Scaled, complex, float]:
    """t = (2iE/ħ)/W(f₋,f₊), r = W(conj f₋,f₊)/W(f₋,f₊) and | |t|²+|r|²−1 |."""
    if W_mp.mant == 0 or not math.isfinite(W_mp.exp):
        raise SingularWronskianError("W(f-, f+) vanishes")
    t = Scaled.of(2j * params.E / params.hbar) / W_mp
    r = (W_conj / W_mp).to_complex()
    t2 = math.exp(2.0 * t.log_abs()) if t.log_abs() > -350 else 0.0
    return t, r, abs(t2 + abs(r) ** 2 - 1.0)


def log_derivative(jb) -> complex:
    y = getattr(jb, "log_derivative", None)
    return complex(y) if y is not None else (jb.f_prime / jb.f).to_complex()


def spectral_measure(jb_minus, jb_plus, params: SemiParams, use_identity: bool = True) -> float:
    """e(0,0,E;ħ) = Im[1/(f₊′/f₊ − f₋′/f₋)].

    The imaginary parts of the logarithmic derivatives are exponentially
    small inside a barrier.  With use_identity they are taken from
    Im(conj f₊ f₊′) = E/ħ = −Im(conj f₋ f₋′), which only needs |f±|; without
    it the supplied log-derivatives are used as they are.
    """
    y_p = log_derivative(jb_plus)
    y_m = log_derivative(jb_minus)
    if use_identity:
        k = params.E / params.hbar
        im_p = k * math.exp(-2.0 * jb_plus.f.log_abs())
        im_m = -k * math.exp(-2.0 * jb_minus.f.log_abs())
        y_p = complex(y_p.real, im_p)
        y_m = complex(y_m.real, im_m)
    D = y_p - y_m
    e = (1.0 / D).imag
    if not math.isfinite(e):
        raise ArithmeticError("spectral measure assembly produced a non-finite value")
    return e


def scattering_result(jb_minus, jb_plus, params: SemiParams, use_identity: bool = True) -> ScatteringResult:
    W, Wc, notes = wronskians(jb_minus, jb_plus)
    t, r, defect = amplitudes(W, Wc, params)
    e = spectral_measure(jb_minus, jb_plus, params, use_identity=use_identity)
    return ScatteringResult(t=t, r=r, W_mp=W, W_conj=Wc, unitarity_defect=defect, e_00=e, warnings=notes)


# ---------------------------------------------------------------------------
# exponents


def wkb_action(spec: PotentialSpec, params: SemiParams) -> float:
    """∫ √(V − E²) dx between the two turning points."""
    lo, hi = turning_points(spec, params)
    E2 = params.E**2

    def g(x):
        return math.sqrt(max(float(eval_potential(spec, x)) - E2, 0.0))

    # split at the maximum so each piece has a single square-root endpoint
    xs = np.linspace(lo, hi, 2001)
    mid = float(xs[int(np.argmax(eval_potential(spec, xs)))])
    total = 0.0
    for a, b in ((lo, mid), (mid, hi)):
        val, _ = quad(g, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    return total


def _linfit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def fit_exponents(hbars: Sequence[float], results: Sequence[ScatteringResult], spec: PotentialSpec,
                  params: SemiParams, min_r2: float = 0.999) -> ExponentFit:
    """Regress log|t| and log(|e|/ħ) on 1/ħ; slopes −S and −2S̃."""
    return fit_exponent_data(hbars, [res.t.log_abs() for res in results], [res.e_00 for res in results],
                             spec, params, min_r2)


def fit_exponent_data(hbars: Sequence[float], log_abs_t: Sequence[float], e00: Sequence[float],
                      spec: PotentialSpec, params: SemiParams, min_r2: float = 0.999) -> ExponentFit:
    """fit_exponents on raw columns (natural log of |t| and the e samples)."""
    if len(hbars) < 5:
        raise FitError("need at least 5 hbar values")
    inv = [1.0 / h for h in hbars]
    if not all(math.isfinite(v) for v in log_abs_t):
        raise FitError("non-finite |t| in sweep")
    slope, _, r2 = _linfit(inv, log_abs_t)
    if not all(math.isfinite(e) and e != 0.0 for e in e00):
        raise FitError("e00 samples must be finite and nonzero")
    log_e = [math.log(abs(e) / h) for e, h in zip(e00, hbars)]
    slope_e, _, r2e = _linfit(inv, log_e)
    S_wkb = wkb_action(spec, params)
    fit = ExponentFit(S_fit=-slope, S_wkb=S_wkb, S_tilde_fit=-0.5 * slope_e,
                      slope_error=abs(-slope - S_wkb) / S_wkb, r2=r2, r2_tilde=r2e)
    if r2 < min_r2:
        raise FitError(f"log|t| regression R²={r2:.6f} below {min_r2}")
    return fit


# ---------------------------------------------------------------------------
# derivative scaling


@dataclass(frozen=True)
class ScalingReport:
    ell: int
    hbars: tuple[float, ...]
    sups: tuple[float, ...]
    ratios: tuple[float, ...]
    bounded: bool
    inconclusive: bool


_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-2, -1, 1, 2), (1 / 12, -2 / 3, 2 / 3, -1 / 12)),
    2: ((-2, -1, 0, 1, 2), (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)),
}


def _fd(q: Callable[[float], float], E: float, h: float, ell: int) -> float:
    offs, w = _STENCILS[ell]
    return sum(wi * q(E + o * h) for o, wi in zip(offs, w)) / h**ell


def derivative_scaling_check(quantity: Callable[[float, float], float], E_points: Sequence[float],
                             hbars: Sequence[float], ell: int, step: float = 0.05,
                             band: tuple[float, float] = (1 / 3, 3.0)) -> ScalingReport:
    """sup over E of ħ^ℓ |∂_E^ℓ quantity(E, ħ)| for each ħ, and its ratios.

    quantity(E, ħ) is typically ħ·log|t|.  The finite-difference step is
    step·min(E, ħ); a second estimate at half the step flags stencil noise.
    """
    if ell not in _STENCILS:
        raise ValueError("ell must be 0, 1 or 2")
    sups = []
    noisy = False
    for hb in hbars:
        best = 0.0
        for E in E_points:
            dE = step * min(E, hb)
            q = lambda e: quantity(e, hb)  # noqa: E731
            d1 = _fd(q, E, dE, ell)
            if ell > 0:
                d2 = _fd(q, E, 0.5 * dE, ell)
                if abs(d1 - d2) > 0.1 * max(abs(d1), abs(d2), 1e-300) and abs(d1) * hb**ell > 1e-10:
                    noisy = True
                d1 = d2
            best = max(best, hb**ell * abs(d1))
        sups.append(best)
    ratios = tuple(sups[i + 1] / sups[i] if sups[i] > 0 else math.inf for i in range(len(sups) - 1))
    bounded = all(band[0] <= r <= band[1] for r in ratios)
    return ScalingReport(ell=ell, hbars=tuple(hbars), sups=tuple(sups), ratios=ratios,
                         bounded=bounded, inconclusive=noisy)
