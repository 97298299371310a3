"""Jost boundary data f₊(0), f₊′(0) from the Liouville-Green construction.

On the tail side, with x' = x − log A and z = (2/α)e^{-x'/2},

    f₊(x) = N e^{x'/4} φ'(z)^{-1/2} ǧ(φ(z)),
    N = A^{iν/2} C^{iν} 2^{-1/2+iν} ħ^{1/2-iν},

where φ is the normalising map, C = lim φ(z)/z and ǧ solves the normal
form G_ww = [(1 − w^{-2})/ħ₁² − S]G with ǧ ~ B₋(w/ħ₁) as w → 0.

Small ν: ǧ = B₋(w/ħ₁)(1 + a) below the matching point w₁ = 10ħ₁, then
γ̌₁ǧ₁ + γ̌₂ǧ₂ with ǧ₂ = B₂(w/ħ₁)(1 + a₂) and ǧ₁ from reduction of order.

Large ν: in v = w/(ħ₁ν) and the Airy variable ζ(v), ǧ = K_ν^{-1} ζ'^{-1/2} Φ₋
with Φ₋ = φ₋(1 + σ₋) up to ζ = 0, then β₁Φ₁ + β₂Φ₂ with Φ₂ = φ₂(1 + σ₂)
(φ₂ = −Im φ₋) and Φ₁ from reduction of order.

In both regimes the oscillatory-side solution is also carried straight to
the evaluation point by the same Volterra equation; the two routes are
compared and the discrepancy is reported.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .lg import LGMap, build_lg_map, build_zeta
from .params import PotentialSpec, SemiParams
from .quadrature import PanelMesh, gauss_legendre, graded_breaks
from .scaled import Scaled
from .special import bessel_B, large_nu_prefactor, small_nu_system
from .volterra import NonvanishingError, VolterraSolution, scaled_cumulative, solve_on_mesh

REGIME_THRESHOLD = 5.0
SMALL_NU_MAX = 9.0
LARGE_NU_MIN = 2.0
MATCH_V = 10.0
V_MIN = 1e-6
CAP = 0.5
P = 16


class RegimeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# meshes in t = log z carrying the normalising-map data


@dataclass
class _Track:
    """Nodes and breaks of a log z mesh with φ data and the physical variable."""

    mesh: PanelMesh
    z: np.ndarray
    zb: np.ndarray
    d: np.ndarray  # φ, φ', φ'', φ''' at nodes, shape (4, n, p)
    db: np.ndarray  # same at breaks
    S: np.ndarray
    Sb: np.ndarray
    marks: dict = field(default_factory=dict)

    def at(self, key):
        return self.marks[key]


def _breaks(lg: LGMap, nu: float, z_lo: float, z_hi: float, marks) -> np.ndarray:
    scale = math.exp(lg.log_c) / lg.hbar1

    def rate(t):
        v = np.exp(t) * scale
        return 1.0 + np.sqrt(v * v + nu * nu + 0.25)

    pts = [math.log(z_lo)]
    for m in sorted(marks):
        if z_lo < m < z_hi:
            pts.append(math.log(m))
    pts.append(math.log(z_hi))
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        out.extend(graded_breaks(a, b, rate, CAP)[1:])
    return np.array(out)


def _schwarzian(d):
    return 0.75 * d[2] ** 2 / d[1] ** 4 - 0.5 * d[3] / d[1] ** 3


def _track(lg: LGMap, t_breaks: np.ndarray, mark_z: dict) -> _Track:
    s, _ = gauss_legendre(P)
    mid = 0.5 * (t_breaks[1:] + t_breaks[:-1])
    half = 0.5 * np.diff(t_breaks)
    t = mid[:, None] + half[:, None] * s[None, :]
    z = np.exp(t)
    zb = np.exp(t_breaks)
    zb[-1] = min(zb[-1], lg.z_end)
    d = lg.phi_derivs(z.ravel()).reshape((4,) + z.shape)
    db = lg.phi_derivs(zb)
    marks = {}
    for key, zm in mark_z.items():
        j = int(np.argmin(np.abs(t_breaks - math.log(zm))))
        if abs(t_breaks[j] - math.log(zm)) > 1e-12:
            raise AssertionError(f"mark {key} is not a panel break")
        marks[key] = j
    mesh = PanelMesh(t_breaks, P, np.zeros_like(t), np.ones_like(t), np.zeros_like(t_breaks))
    return _Track(mesh, z, zb, d, db, _schwarzian(d), _schwarzian(db), marks)


def _with_x(tr: _Track, x, dx, xb) -> PanelMesh:
    return PanelMesh(tr.mesh.t_breaks, P, x, dx, xb)


# ---------------------------------------------------------------------------
# homogeneous solutions


def _log_bessel(nu, v, sign):
    shape = np.shape(v)
    L, dL, cond = bessel_B(nu, np.ravel(v), sign)
    return L.reshape(shape), dL.reshape(shape), cond.reshape(shape)


def _log_phi_minus(nu, zm, v):
    """log φ₋ and dlog φ₋/dζ with φ₋ = K_ν ζ'^{1/2} B₋(νv)."""
    shape = np.shape(v)
    vv = np.ravel(v)
    z1 = zm.derivs(vv, 1)
    z2 = zm.derivs(vv, 2)
    LB, dLB, _ = bessel_B(nu, nu * vv, -1)
    L = large_nu_prefactor(nu) + 0.5 * np.log(z1) + LB
    dL = (0.5 * z2 / z1 + nu * dLB) / z1
    return L.reshape(shape), dL.reshape(shape)


def _log_phi_two(L, dL):
    """log and dlog of φ₂ = −Im φ₋ from those of φ₋."""
    s = -np.sin(L.imag)
    if np.any(s <= 0):
        raise NonvanishingError("−Im φ₋ vanishes on the growing side")
    return L.real + np.log(s), dL.real + np.cos(L.imag) / np.sin(L.imag) * dL.imag


# ---------------------------------------------------------------------------
# regime parts


@dataclass
class _Route:
    """log u and dlog u/dx at the breaks of a track (x = w or ζ)."""

    L: np.ndarray
    dL: np.ndarray


def _perturbed(mesh, L, Lb, dLb, b, base="left", tol=1e-13):
    sol = solve_on_mesh(mesh, L, Lb, b, base=base, tol=tol)
    one = 1.0 + sol.phi_breaks
    return sol, _Route(Lb + np.log(one), dLb + sol.dphi_breaks / one)


def _wronskian(La, dLa, Lb, dLb):
    """W(u_a, u_b) = u_a u_b (dlog u_b − dlog u_a)."""
    return cmath.exp(La + Lb) * (dLb - dLa)


@dataclass
class SmallNuJostParts:
    """Small-ν fundamental system along one side.

    c_check_pm: the correction a in ǧ₋ = B₋(1 + a) (solution object on the
    log z mesh); c_check_2: a₂ in ǧ₂ = B₂(1 + a₂); c_check_1: the reduction
    integral J with ǧ₁ = (2/ħ₁)(1 + a₂)e^{-log B₂}J.
    """

    lg: LGMap
    params: SemiParams
    mode: str
    c_check_pm: VolterraSolution | None
    c_check_1: np.ndarray | None
    c_check_2: VolterraSolution | None
    gamma_check_1: complex
    gamma_check_2: complex
    log_g: complex
    dlog_g: complex
    direct_log_g: complex
    direct_dlog_g: complex
    wronskian_variation: float
    w_e: float
    z_e: float


@dataclass
class LargeNuJostParts:
    """Large-ν fundamental system in the Airy variable ζ.

    sigma_pm: σ₋ in Φ₋ = φ₋(1 + σ₋); sigma_2: σ₂ in Φ₂ = φ₂(1 + σ₂);
    sigma_1: the reduction integral giving Φ₁; beta_conn = (β₁, β₂) with
    Φ₋ = β₁Φ₁ + β₂Φ₂.
    """

    lg: LGMap
    params: SemiParams
    mode: str
    sigma_pm: VolterraSolution | None
    sigma_1: np.ndarray | None
    sigma_2: VolterraSolution | None
    beta_conn: tuple[complex, complex]
    log_Phi: complex
    dlog_Phi: complex
    direct_log_Phi: complex
    direct_dlog_Phi: complex
    wronskian_variation: float
    zeta_e: float
    z_e: float
    v_e: float


def _combine(c1, L1, d1, c2, L2, d2):
    """log and dlog of c1·e^{L1} + c2·e^{L2} (scaled)."""
    a = Scaled.from_log(complex(L1)) * c1
    b = Scaled.from_log(complex(L2)) * c2
    s = a + b
    ds = a * d1 + b * d2
    y = (ds / s).to_complex()
    return complex(s.exp + cmath.log(s.mant)), y


def match_point(nu: float) -> float:
    """Matching abscissa v₁ = w₁/ħ₁ for the small-ν construction.

    B₋ = γ₁B₁ + γ₂B₂ with |γ₁/γ₂| ~ e^{πν}; extracting γ₂ at v₁ loses about
    e^{πν − 2v₁} relative accuracy, so v₁ grows with ν beyond the default 10.
    """
    return max(MATCH_V, math.pi * nu)


def small_nu_parts(spec: PotentialSpec, params: SemiParams, mode: str = "converged",
                   lg: LGMap | None = None) -> SmallNuJostParts:
    """ǧ₋ at the evaluation point through the small-ν matching construction."""
    nu = params.nu
    if nu > SMALL_NU_MAX:
        raise RegimeError(f"nu={nu:.4g} is outside the small-ν construction (≤ {SMALL_NU_MAX})")
    lg = lg or build_lg_map(spec, params, 1)
    h1 = lg.hbar1
    z_e = lg.z_e
    w_e = float(lg.phi(z_e)[0])
    if mode == "leading":
        L, dL, _ = _log_bessel(nu, np.array([w_e / h1]), -1)
        lgv, dlgv = complex(L[0]), complex(dL[0]) / h1
        return SmallNuJostParts(lg, params, mode, None, None, None, 0j, 0j, lgv, dlgv, lgv, dlgv, 0.0, w_e, z_e)
    if mode != "converged":
        raise ValueError("mode must be 'leading' or 'converged'")

    v1 = match_point(nu)
    w1 = v1 * h1
    matched = w1 < w_e
    z1 = float(lg.inverse(np.array([w1]))[0]) if matched else None
    z_min = float(lg.inverse(np.array([V_MIN * h1]))[0])
    marks = {"e": z_e}
    if matched:
        marks["1"] = z1
    win = [lg.z_a, lg.z_b]
    tb = _breaks(lg, nu, z_min, lg.z_end, list(marks.values()) + win)
    tr = _track(lg, tb, marks)

    # ǧ₋ = B₋(w/ħ₁)(1 + a), based at w ≈ 0
    w, wb = tr.d[0], tr.db[0]
    mesh = _with_x(tr, w, tr.d[1] * tr.z, wb)
    L, _, _ = _log_bessel(nu, w / h1, -1)
    Lb, dLb, _ = _log_bessel(nu, wb / h1, -1)
    sol_m, rm = _perturbed(mesh, L, Lb, dLb / h1, -tr.S + 0j)
    je = tr.at("e")
    direct = (complex(rm.L[je]), complex(rm.dL[je]))

    if not matched:
        return SmallNuJostParts(lg, params, mode, sol_m, None, None, 0j, 1.0 + 0j, direct[0], direct[1],
                                direct[0], direct[1], 0.0, w_e, z_e)

    # ǧ₂ = B₂(w/ħ₁)(1 + a₂) on [w₁, w_end]
    j1 = tr.at("1")
    sub = _track_slice(tr, j1)
    system = small_nu_system(nu, w0=v1, nu0=SMALL_NU_MAX)
    w2, w2b = sub.d[0], sub.db[0]
    mesh2 = _with_x(sub, w2, sub.d[1] * sub.z, w2b)
    L2, _ = system.log_B2(np.maximum(w2 / h1, v1).ravel())
    L2 = L2.reshape(w2.shape)
    L2b, dL2b = system.log_B2(np.maximum(w2b / h1, v1))
    sol2, r2 = _perturbed(mesh2, L2 + 0j, L2b + 0j, dL2b / h1 + 0j, -sub.S + 0j)
    # ǧ₁ = (2/ħ₁) ǧ₂ ∫_w^{w_end} ǧ₂^{-2}
    F = (1.0 + sol2.phi) ** -2
    _, Jb = scaled_cumulative(mesh2, -L2, -L2b, F, base="right")
    Jb = Jb.real
    a2b = sol2.phi_breaks.real
    with np.errstate(divide="ignore"):
        L1b = math.log(2.0 / h1) + np.log1p(a2b) - L2b + np.log(Jb)
        dL1b = r2.dL.real - (1.0 + a2b) ** -2 / Jb
    L1b = L1b + 0j

    W12 = 2.0 / h1
    k1 = 0  # matching break within the sub-track
    ke = je - j1
    g1 = _wronskian(rm.L[j1], rm.dL[j1], r2.L[k1], r2.dL[k1]) / W12
    g2 = _wronskian(L1b[k1], dL1b[k1], rm.L[j1], rm.dL[j1]) / W12
    log_g, dlog_g = _combine(g1, L1b[ke], dL1b[ke], g2, r2.L[ke], r2.dL[ke])

    # W(ǧ₁, ǧ₂) along the matched interval
    idx = [k1, (k1 + ke) // 2, ke]
    ws = [_wronskian(L1b[i], dL1b[i], r2.L[i], r2.dL[i]) / W12 for i in idx]
    variation = max(abs(x - 1.0) for x in ws)
    return SmallNuJostParts(lg, params, mode, sol_m, Jb, sol2, g1, g2, log_g, dlog_g,
                            direct[0], direct[1], variation, w_e, z_e)


def _track_slice(tr: _Track, j: int) -> _Track:
    """Panels j..end of a track (breaks re-indexed from 0)."""
    mesh = PanelMesh(tr.mesh.t_breaks[j:], P, tr.mesh.x[j:], tr.mesh.dx[j:], tr.mesh.x_breaks[j:])
    return _Track(mesh, tr.z[j:], tr.zb[j:], tr.d[:, j:], tr.db[:, j:], tr.S[j:], tr.Sb[j:],
                  {k: v - j for k, v in tr.marks.items() if v >= j})


def large_nu_parts(spec: PotentialSpec, params: SemiParams, mode: str = "converged",
                   lg: LGMap | None = None) -> LargeNuJostParts:
    """Φ₋ at the evaluation point through the large-ν Airy-type construction."""
    nu = params.nu
    if nu < LARGE_NU_MIN:
        raise RegimeError(f"nu={nu:.4g} is outside the large-ν construction (≥ {LARGE_NU_MIN})")
    lg = lg or build_lg_map(spec, params, 1)
    zm = build_zeta()
    h1 = lg.hbar1
    scale = h1 * nu
    z_e = lg.z_e
    w_e = float(lg.phi(z_e)[0])
    v_e = w_e / scale
    zeta_e = float(zm(v_e)[0])
    if mode == "leading":
        L, dL = _log_phi_minus(nu, zm, np.array([v_e]))
        lv, dv = complex(L[0]), complex(dL[0])
        return LargeNuJostParts(lg, params, mode, None, None, None, (1.0 + 0j, 0j), lv, dv, lv, dv, 0.0,
                                zeta_e, z_e, v_e)
    if mode != "converged":
        raise ValueError("mode must be 'leading' or 'converged'")

    matched = zeta_e > 0.0
    z0 = float(lg.inverse(np.array([scale]))[0]) if matched else None
    z_min = float(lg.inverse(np.array([V_MIN * scale]))[0])
    marks = {"e": z_e}
    if matched:
        marks["0"] = z0
    tb = _breaks(lg, nu, z_min, lg.z_end, list(marks.values()) + [lg.z_a, lg.z_b])
    tr = _track(lg, tb, marks)

    def airy_data(track):
        v, vb = track.d[0] / scale, track.db[0] / scale
        zeta = zm(v.ravel()).reshape(v.shape)
        zp = zm.derivs(v.ravel(), 1).reshape(v.shape)
        zetab = zm(vb)
        zpb = zm.derivs(vb, 1)
        dx = zp * track.d[1] * track.z / scale
        mesh = _with_x(track, zeta, dx, zetab)
        b = -(scale**2) * track.S / zp**2
        return mesh, v, vb, b

    # Φ₋ = φ₋(1 + σ₋) from v ≈ 0; valid on the whole track
    mesh, v, vb, b = airy_data(tr)
    L, _ = _log_phi_minus(nu, zm, v)
    Lb, dLb = _log_phi_minus(nu, zm, vb)
    sol_m, rm = _perturbed(mesh, L, Lb, dLb, b + 0j)
    je = tr.at("e")
    direct = (complex(rm.L[je]), complex(rm.dL[je]))
    if not matched:
        return LargeNuJostParts(lg, params, mode, sol_m, None, None, (1.0 + 0j, 0j), direct[0], direct[1],
                                direct[0], direct[1], 0.0, zeta_e, z_e, v_e)

    # Φ₂ = φ₂(1 + σ₂), growing from ζ = 0
    j0 = tr.at("0")
    sub = _track_slice(tr, j0)
    mesh2, v2, v2b, b2 = airy_data(sub)
    L2, _ = _log_phi_two(*_log_phi_minus(nu, zm, v2))
    L2b, dL2b = _log_phi_two(*_log_phi_minus(nu, zm, v2b))
    sol2, r2 = _perturbed(mesh2, L2 + 0j, L2b + 0j, dL2b + 0j, b2 + 0j)
    # Φ₁ = (ν^{2/3}/π) Φ₂ ∫_ζ^{ζ_end} Φ₂^{-2}
    W12 = nu ** (2.0 / 3.0) / math.pi
    F = (1.0 + sol2.phi) ** -2
    _, Jb = scaled_cumulative(mesh2, -L2, -L2b, F, base="right")
    Jb = Jb.real
    a2b = sol2.phi_breaks.real
    with np.errstate(divide="ignore"):
        L1b = math.log(W12) + np.log1p(a2b) - L2b + np.log(Jb)
        dL1b = r2.dL.real - (1.0 + a2b) ** -2 / Jb
    L1b = L1b + 0j

    k0, ke = 0, je - j0
    b1 = _wronskian(rm.L[j0], rm.dL[j0], r2.L[k0], r2.dL[k0]) / W12
    b2c = _wronskian(L1b[k0], dL1b[k0], rm.L[j0], rm.dL[j0]) / W12
    log_p, dlog_p = _combine(b1, L1b[ke], dL1b[ke], b2c, r2.L[ke], r2.dL[ke])
    idx = [k0, ke // 2, ke]
    ws = [_wronskian(L1b[i], dL1b[i], r2.L[i], r2.dL[i]) / W12 for i in idx]
    variation = max(abs(x - 1.0) for x in ws)
    return LargeNuJostParts(lg, params, mode, sol_m, Jb, sol2, (b1, b2c), log_p, dlog_p,
                            direct[0], direct[1], variation, zeta_e, z_e, v_e)


# ---------------------------------------------------------------------------
# boundary data


@dataclass(frozen=True)
class JostBoundary:
    f: Scaled
    f_prime: Scaled
    S: float
    T: float
    c: float
    gamma_mod: float
    regime: str
    mode: str
    log_derivative: complex | None = None
    direct_route_discrepancy: float = 0.0
    wronskian_variation: float = 0.0
    source: str = "liouville_green"


def regime_of(nu: float, threshold: float = REGIME_THRESHOLD) -> str:
    return "small_nu" if nu <= threshold else "large_nu"


def _assemble(spec, params, side_spec_amp, lg, log_g, dlog_g_dw):
    """f and f′/f at the evaluation point from ǧ there (w-derivative)."""
    nu, hbar = params.nu, params.hbar
    A = side_spec_amp
    z = lg.z_e
    d = lg.phi_derivs(np.array([z]))[:, 0]
    xp = -2.0 * math.log(0.5 * lg.alpha * z)  # x' at z
    log_N = (0.5j * nu * math.log(A) + 1j * nu * lg.log_c + (-0.5 + 1j * nu) * math.log(2.0)
             + (0.5 - 1j * nu) * math.log(hbar))
    log_f = log_N + 0.25 * xp - 0.5 * math.log(d[1]) + log_g
    y = 0.25 - 0.5 * z * (-0.5 * d[2] / d[1] + d[1] * dlog_g_dw)
    return complex(log_f), complex(y)


def _plus_boundary(spec, params, mode, threshold, lg=None) -> JostBoundary:
    nu, hbar, alpha = params.nu, params.hbar, params.alpha
    regime = regime_of(nu, threshold)
    lg = lg or build_lg_map(spec, params, 1)
    A = spec.amplitude(1)
    if regime == "small_nu":
        parts = small_nu_parts(spec, params, mode, lg)
        log_g, dlog_g = parts.log_g, parts.dlog_g
        d_log, d_dlog = parts.direct_log_g, parts.direct_dlog_g
        S = alpha * parts.w_e
        T = -2.0 * params.E * math.log(hbar)
    else:
        parts = large_nu_parts(spec, params, mode, lg)
        zm = build_zeta()
        scale = lg.hbar1 * nu
        v = np.array([parts.v_e])
        z1, z2 = zm.derivs(v, 1)[0], zm.derivs(v, 2)[0]
        shift = -large_nu_prefactor(nu) - 0.5 * math.log(z1)

        def to_g(L, dL):
            return L + shift, (-0.5 * z2 / z1 + z1 * dL) / scale

        log_g, dlog_g = to_g(parts.log_Phi, parts.dlog_Phi)
        d_log, d_dlog = to_g(parts.direct_log_Phi, parts.direct_dlog_Phi)
        S = hbar * nu * (2.0 / 3.0) * max(parts.zeta_e, 0.0) ** 1.5
        T = -2.0 * params.E * math.log(alpha)
    log_f, y = _assemble(spec, params, A, lg, log_g, dlog_g)
    log_fd, yd = _assemble(spec, params, A, lg, d_log, d_dlog)
    disc = max(abs(cmath.exp(log_f - log_fd) - 1.0), abs(y - yd) / max(abs(y), 1e-300))
    f = Scaled.from_log(log_f)
    gamma_mod = math.exp(log_f.real - 0.5 * math.log(alpha) - S / hbar)
    return JostBoundary(f=f, f_prime=f * y, S=S, T=T, c=-hbar * y.real, gamma_mod=gamma_mod, regime=regime,
                        mode=mode, log_derivative=y, direct_route_discrepancy=disc,
                        wronskian_variation=parts.wronskian_variation)


def _oracle_boundary(spec, params) -> JostBoundary:
    from .oracle import integrate_jost

    o = integrate_jost(spec, params, 1, 0.0)
    S = params.hbar * (o.f.log_abs() - 0.5 * math.log(params.alpha))
    return JostBoundary(f=o.f, f_prime=o.f_prime, S=S, T=float(cmath.phase(o.f.mant)) * params.hbar,
                        c=-params.hbar * o.log_derivative.real, gamma_mod=1.0,
                        regime=regime_of(params.nu), mode="oracle", log_derivative=o.log_derivative,
                        wronskian_variation=o.wronskian_drift, source="oracle")


def reflect_boundary(jb: JostBoundary) -> JostBoundary:
    y = None if jb.log_derivative is None else -jb.log_derivative
    return JostBoundary(f=jb.f, f_prime=-jb.f_prime, S=jb.S, T=jb.T, c=jb.c, gamma_mod=jb.gamma_mod,
                        regime=jb.regime, mode=jb.mode, log_derivative=y,
                        direct_route_discrepancy=jb.direct_route_discrepancy,
                        wronskian_variation=jb.wronskian_variation, source=jb.source)


def jost_boundary(spec: PotentialSpec, params: SemiParams, side: int = 1, mode: str = "converged",
                  threshold: float = REGIME_THRESHOLD) -> JostBoundary:
    """f_±(0) and f_±′(0).

    f₋ is f₊ of the reflected potential with the derivative negated.  A side
    without an exponential tail (the inverse-square side of Regge-Wheeler)
    is handed to the direct integrator.
    """
    s = spec if side > 0 else spec.reflected()
    if s.tail(1) is None:
        jb = _oracle_boundary(s, params)
    else:
        jb = _plus_boundary(s, params, mode, threshold)
    return jb if side > 0 else reflect_boundary(jb)
