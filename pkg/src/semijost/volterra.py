"""Successive approximation for Volterra equations built on a homogeneous solution.

Every kernel used here has the shape

    K(x, y) = [integral between x and y of u0(u)^-2 a(u) du] * u0(y)^2 b(y),

with u0 = exp(-ωx), Ai, Bi, Ai(-x) ± iBi(-x) or any nonvanishing solution
supplied by the caller.  The solver works with log u0 so that the factors
u0(y)^2 / u0(u)^2 are formed as exp(2(L(y) - L(u))) and never overflow.

Integrating from the base point, the equation is equivalent to the pair

    G(x) = ∫_base^x exp(2(L(y) - L(x))) b(y) (1 + φ(y)) dy,
    φ(x) = ∫_base^x a(u) G(u) du,

which is evaluated panel by panel in O(N p) per sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import PanelMesh, build_mesh, gauss_legendre, graded_breaks, integration_matrix


class VolterraError(RuntimeError):
    pass


class NonContractionError(VolterraError):
    pass


class IterationLimitError(VolterraError):
    pass


class NonvanishingError(VolterraError):
    pass


# exponent span allowed inside one block of the scaled running sum
_BLOCK_SPAN = 150.0


@dataclass
class VolterraSolution:
    """Nodal solution of a Volterra equation on a panel mesh.

    `phi` and `dphi` are given at the mesh nodes in the mesh's own
    orientation (increasing x).  `phi_breaks` / `dphi_breaks` hold the
    values at panel endpoints.
    """

    mesh: PanelMesh
    phi: np.ndarray
    dphi: np.ndarray
    phi_breaks: np.ndarray
    dphi_breaks: np.ndarray
    iterations: int
    residual: float
    tail_bound: float = 0.0
    ratios: list = field(default_factory=list)

    def __call__(self, t) -> np.ndarray:
        return self.mesh.interpolate(self.phi, t)

    def derivative(self, t) -> np.ndarray:
        return self.mesh.interpolate(self.dphi, t)

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.phi)))


class _Sweep:
    """Precomputed panel operators for one orientation of one problem."""

    def __init__(self, half, dx, L, Lb, weight, p):
        S = integration_matrix(p)
        _, w = gauss_legendre(p)
        self.hx = half[:, None] * dx
        # local kernel e^{2(L(y_m) - L(x_k))} restricted to the panel
        E = np.exp(2.0 * (L[:, None, :] - L[:, :, None]))
        self.M = S[None, :, :] * E * self.hx[:, None, :]
        self.to_end = w[None, :] * np.exp(2.0 * (L - Lb[1:, None])) * self.hx
        self.from_start = np.exp(2.0 * (Lb[:-1, None] - L))
        self.Lb = Lb
        self.S = S
        self.w = w
        self.weight = weight
        self.whx = weight * self.hx

    def apply(self, F, g0, a0):
        n = F.shape[0]
        local = np.einsum("jkm,jm->jk", self.M, F)
        d = np.sum(self.to_end * F, axis=1)
        g = _scaled_recurrence(self.Lb, d, g0)
        G = self.from_start * g[:-1, None] + local
        H = self.whx * G
        a_left = np.empty(n + 1, dtype=complex)
        a_left[0] = a0
        a_left[1:] = a0 + np.cumsum(H @ self.w)
        a = a_left[:-1, None] + H @ self.S.T
        return a, self.weight * G, a_left, g


def _scaled_recurrence(Lb: np.ndarray, d: np.ndarray, g0: complex) -> np.ndarray:
    """Solve g[j+1] = exp(2(Lb[j]-Lb[j+1])) g[j] + d[j] without overflow."""
    n = len(d)
    g = np.empty(n + 1, dtype=complex)
    g[0] = g0
    re = Lb.real
    j = 0
    while j < n:
        ref = re[j]
        k = j
        while k < n and abs(re[k + 1] - ref) < _BLOCK_SPAN:
            k += 1
        if k == j:
            g[j + 1] = np.exp(2.0 * (Lb[j] - Lb[j + 1])) * g[j] + d[j]
            j += 1
            continue
        # on panels j..k-1 accumulate Γ = g e^{2(Lb - ref)}
        gam0 = g[j] * np.exp(2.0 * (Lb[j] - ref))
        terms = d[j:k] * np.exp(2.0 * (Lb[j + 1 : k + 1] - ref))
        gam = gam0 + np.cumsum(terms)
        g[j + 1 : k + 1] = gam * np.exp(2.0 * (ref - Lb[j + 1 : k + 1]))
        j = k
    return g


def solve_on_mesh(
    mesh: PanelMesh,
    log_u0: np.ndarray,
    log_u0_breaks: np.ndarray,
    b: np.ndarray,
    *,
    base: str,
    weight: np.ndarray | None = None,
    weight_breaks: np.ndarray | None = None,
    phi_base: complex = 0.0,
    dphi_base: complex = 0.0,
    tol: float = 1e-12,
    max_iter: int = 200,
    phi_init: np.ndarray | None = None,
    tail_bound: float = 0.0,
) -> VolterraSolution:
    """Solve the Volterra equation on a prepared mesh.

    base='left' integrates from the left end (finite base point), base='right'
    from the right end (truncated base point at infinity).  `phi_base` and
    `dphi_base` give φ and dφ/dx at the base; both vanish for a genuine base
    point and carry asymptotic tail data after truncation.
    """
    p = mesh.p
    n = mesh.n_panels
    if weight is None:
        weight = np.ones(mesh.x.shape)
    L = np.asarray(log_u0, dtype=complex)
    Lb = np.asarray(log_u0_breaks, dtype=complex)
    b = np.asarray(b, dtype=complex)
    wgt = np.asarray(weight, dtype=complex)

    if base == "left":
        half, dx = mesh.half, mesh.dx
        flip = lambda arr: arr  # noqa: E731
        flipb = lambda arr: arr  # noqa: E731
        sgn = 1.0
    elif base == "right":
        half, dx = mesh.half[::-1], mesh.dx[::-1, ::-1]
        flip = lambda arr: arr[::-1, ::-1]  # noqa: E731
        flipb = lambda arr: arr[::-1]  # noqa: E731
        sgn = -1.0
    else:
        raise ValueError("base must be 'left' or 'right'")

    sweep = _Sweep(half, dx, flip(L), flipb(Lb), flip(wgt), p)
    bf = flip(b)
    w_base = 1.0 if weight_breaks is None else flipb(np.asarray(weight_breaks, dtype=complex))[0]
    g0 = sgn * dphi_base / w_base if dphi_base != 0 else 0.0
    a = np.zeros((n, p), dtype=complex) if phi_init is None else flip(np.asarray(phi_init, dtype=complex))
    last = None
    ratios: list[float] = []
    bad = 0
    for it in range(1, max_iter + 1):
        a_new, da_new, a_left, _ = sweep.apply(bf * (1.0 + a), g0, phi_base)
        change = float(np.max(np.abs(a_new - a)))
        a, da = a_new, da_new
        scale = 1.0 + float(np.max(np.abs(a)))
        if last is not None and last > 0:
            ratio = change / last
            ratios.append(ratio)
            bad = bad + 1 if (ratio >= 1.0 and change > tol * scale) else 0
            if bad >= 5:
                raise NonContractionError(f"successive changes grew for 5 iterations (ratio {ratio:.3g})")
        last = change
        if change <= tol * scale:
            break
    else:
        raise IterationLimitError(f"no convergence after {max_iter} iterations (change {change:.3g})")

    # one more application measures the fixed-point residual
    a_chk, da_chk, a_left, g = sweep.apply(bf * (1.0 + a), g0, phi_base)
    residual = float(np.max(np.abs(a_chk - a)))
    wb = np.ones(n + 1, dtype=complex) if weight_breaks is None else flipb(np.asarray(weight_breaks, dtype=complex))
    phi = flip(a_chk)
    dphi = sgn * flip(da_chk)
    phi_b = flipb(a_left)
    dphi_b = sgn * flipb(wb * g)
    return VolterraSolution(mesh, phi, dphi, phi_b, dphi_b, it, residual, tail_bound, ratios)


def scaled_cumulative(mesh: PanelMesh, L, Lb, F, base: str = "left"):
    """G(x) = ∫_base^x exp(2(L(y) - L(x))) F(y) |dy| at nodes and breaks.

    With base='right' the integral runs from the right end down to x.  This
    is the inner integral of the reduction-of-order formulas, formed without
    overflow.
    """
    p = mesh.p
    L = np.asarray(L, dtype=complex)
    Lb = np.asarray(Lb, dtype=complex)
    F = np.asarray(F, dtype=complex)
    if base == "left":
        sweep = _Sweep(mesh.half, mesh.dx, L, Lb, np.ones(mesh.x.shape), p)
        _, G, _, g = sweep.apply(F, 0.0, 0.0)
        return G, g
    if base != "right":
        raise ValueError("base must be 'left' or 'right'")
    sweep = _Sweep(mesh.half[::-1], mesh.dx[::-1, ::-1], L[::-1, ::-1], Lb[::-1],
                   np.ones(mesh.x.shape), p)
    _, G, _, g = sweep.apply(F[::-1, ::-1], 0.0, 0.0)
    return G[::-1, ::-1], g[::-1]


# ---------------------------------------------------------------------------
# problem-level interface


@dataclass(frozen=True)
class VolterraProblem:
    """A Volterra equation φ(x) = ∫ K(x,y)[1+φ(y)] dy of one of the supported kinds.

    kind: 'exponential' (u0 = e^{-ωx} for base infinity, e^{ωx} for a finite
    base), 'airy_decaying' (Ai), 'airy_growing' (Bi), 'airy_oscillatory'
    (Ai(-x) + sign·i·Bi(-x)) or 'solution' (caller-supplied log u0).
    `interval` is (left, right); for base='infinity' the right end is the
    truncation point and `tail` optionally carries (φ, φ') there.
    """

    kind: str
    b_fn: Callable[[np.ndarray], np.ndarray]
    interval: tuple[float, float]
    base: str = "infinity"
    a_fn: Callable[[np.ndarray], np.ndarray] | None = None
    omega: complex = 1.0
    sign: int = 1
    log_u0: Callable[[np.ndarray], np.ndarray] | None = None
    log_u0_rate: Callable[[np.ndarray], np.ndarray] | None = None
    tail: tuple[complex, complex] | None = None
    p: int = 16
    cap: float = 0.5
    tol: float = 1e-12
    max_iter: int = 200


def _kind_log_u0(problem: VolterraProblem):
    kind = problem.kind
    if kind == "exponential":
        om = complex(problem.omega)
        s = -1.0 if problem.base == "infinity" else 1.0
        return (lambda x: s * om * x), (lambda x: np.full(np.shape(x), abs(om)))
    if kind in ("airy_decaying", "airy_growing", "airy_oscillatory"):
        from .special import airy_log

        if kind == "airy_decaying":
            f = lambda x: airy_log(x, "ai")  # noqa: E731
        elif kind == "airy_growing":
            f = lambda x: airy_log(x, "bi")  # noqa: E731
        else:
            which = "osc+" if problem.sign > 0 else "osc-"
            f = lambda x: airy_log(-np.asarray(x), which)  # noqa: E731
        return f, (lambda x: np.sqrt(np.abs(x)) + 1.0)
    if kind == "solution":
        if problem.log_u0 is None:
            raise ValueError("kind 'solution' needs log_u0")
        rate = problem.log_u0_rate or (lambda x: np.ones(np.shape(x)))
        return problem.log_u0, rate
    raise ValueError(f"unknown kernel kind {kind!r}")


def _quarter_period_cap(problem: VolterraProblem, rate):
    om = complex(problem.omega)
    if problem.kind == "exponential" and om.imag != 0:
        return lambda x: np.maximum(rate(x), abs(om.imag) * 4.0 / (2 * math.pi) * problem.cap)
    return rate


def problem_mesh(problem: VolterraProblem) -> PanelMesh:
    _, rate = _kind_log_u0(problem)
    rate = _quarter_period_cap(problem, rate)
    x0, x1 = problem.interval
    brk = graded_breaks(x0, x1, lambda x: np.asarray(rate(x)) + 1e-3, problem.cap)
    return build_mesh(brk, problem.p, None)


def tail_estimate(problem: VolterraProblem) -> float:
    """Rough size of the neglected part ∫_X^∞ K(x,y) dy after truncation at X."""
    if problem.base != "infinity" or problem.tail is not None:
        return 0.0
    X = problem.interval[1]
    s, w = gauss_legendre(32)
    u = 0.5 * (s + 1.0)  # y = X / u maps (0,1] onto [X, ∞)
    y = X / u
    bvals = np.abs(problem.b_fn(y))
    _, rate = _kind_log_u0(problem)
    decay = np.maximum(np.abs(np.asarray(rate(y))), 1e-300)
    amax = 1.0 if problem.a_fn is None else float(np.max(np.abs(problem.a_fn(y))))
    return float(np.sum(0.5 * w * bvals / decay * X / u**2) * amax / 2.0)


def solve(problem: VolterraProblem, phi_init: float | None = None) -> VolterraSolution:
    """Successive approximation φ_{n+1} = RHS(φ_n) to the stated tolerance."""
    mesh = problem_mesh(problem)
    logu, _ = _kind_log_u0(problem)
    L = logu(mesh.x)
    Lb = logu(mesh.x_breaks)
    b = problem.b_fn(mesh.x)
    wgt = None if problem.a_fn is None else problem.a_fn(mesh.x)
    wgt_b = None if problem.a_fn is None else problem.a_fn(mesh.x_breaks)
    if problem.base == "infinity":
        side = "right"
        phi_b, dphi_b = problem.tail if problem.tail is not None else (0.0, 0.0)
    else:
        side = "left"
        phi_b, dphi_b = 0.0, 0.0
    init = None if phi_init is None else np.full(mesh.x.shape, phi_init, dtype=complex)
    return solve_on_mesh(
        mesh, L, Lb, b, base=side, weight=wgt, weight_breaks=wgt_b, phi_base=phi_b, dphi_base=dphi_b,
        tol=problem.tol, max_iter=problem.max_iter, phi_init=init, tail_bound=tail_estimate(problem),
    )


def perturbed_solution(
    log_u0: Callable[[np.ndarray], np.ndarray],
    f_ratio: Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    base: str = "left",
    rate: Callable[[np.ndarray], np.ndarray] | None = None,
    p: int = 16,
    tol: float = 1e-12,
) -> VolterraSolution:
    """Solution u = u0 (1 + φ) of u'' + V u = f with f = f_ratio · u.

    u0 is a nonvanishing solution of u'' + V u = 0 given through log u0.
    With base='left' φ and φ' vanish at the left end; with base='right' they
    vanish at the right end.
    """
    prob = VolterraProblem(
        kind="solution", b_fn=f_ratio, interval=interval,
        base="finite" if base == "left" else "infinity",
        log_u0=log_u0, log_u0_rate=rate, p=p, tol=tol,
    )
    mesh = problem_mesh(prob)
    L = log_u0(mesh.x)
    if not np.all(np.isfinite(L.real)):
        raise NonvanishingError("u0 vanishes on the interval")
    sol = solve_on_mesh(
        mesh, L, log_u0(mesh.x_breaks), f_ratio(mesh.x),
        base="left" if base == "left" else "right", tol=tol,
    )
    return sol


def derivative_scaling_probe(
    family: Callable[[float], VolterraProblem],
    lambdas: np.ndarray,
    x_points: np.ndarray,
    ell: int = 1,
    k: int = 0,
) -> dict:
    """Fitted exponents of sup|∂_λ^ℓ ∂_x^k φ| against λ (finite differences in λ).

    Returns the slope in log λ and the per-λ sup-norms.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    norms = []
    for lam in lambdas:
        h = 1e-3 * lam
        stencil = {0: [0.0], 1: [-1.0, 1.0], 2: [-1.0, 0.0, 1.0]}[ell]
        coef = {0: [1.0], 1: [-0.5, 0.5], 2: [1.0, -2.0, 1.0]}[ell]
        acc = 0.0
        for c, s in zip(coef, stencil):
            sol = solve(family(lam + s * h))
            vals = sol(x_points) if k == 0 else sol.derivative(x_points)
            acc = acc + c * vals
        norms.append(float(np.max(np.abs(acc))) / h**ell)
    norms = np.array(norms)
    ok = norms > 0
    slope = float(np.polyfit(np.log(lambdas[ok]), np.log(norms[ok]), 1)[0]) if ok.sum() >= 2 else float("nan")
    return {"slope": slope, "norms": norms, "lambdas": lambdas, "inconclusive": bool(ok.sum() < 2)}
