"""Composite Gauss-Legendre panels, spectral integration matrices and
barycentric interpolation on panel nodes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg


@lru_cache(maxsize=None)
def gauss_legendre(p: int) -> tuple[np.ndarray, np.ndarray]:
    s, w = npleg.leggauss(p)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


@lru_cache(maxsize=None)
def integration_matrix(p: int) -> np.ndarray:
    """S[k, m] = integral over [-1, s_k] of the m-th Lagrange basis polynomial."""
    s, _ = gauss_legendre(p)
    vand = npleg.legvander(s, p - 1)
    anti = np.empty_like(vand)
    for j in range(p):
        c = np.zeros(p)
        c[j] = 1.0
        anti[:, j] = npleg.legval(s, npleg.legint(c, lbnd=-1.0))
    out = anti @ np.linalg.inv(vand)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def barycentric_weights(p: int) -> np.ndarray:
    s, _ = gauss_legendre(p)
    diff = s[:, None] - s[None, :]
    np.fill_diagonal(diff, 1.0)
    lam = 1.0 / np.prod(diff, axis=1)
    lam /= np.max(np.abs(lam))
    lam.setflags(write=False)
    return lam


def interp_matrix(p: int, targets: np.ndarray) -> np.ndarray:
    """Rows give the Lagrange basis on the p GL nodes evaluated at `targets` in [-1, 1]."""
    s, _ = gauss_legendre(p)
    lam = barycentric_weights(p)
    t = np.asarray(targets, dtype=float)[:, None]
    d = t - s[None, :]
    exact = d == 0.0
    d[exact] = 1.0
    q = lam / d
    q /= q.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if hit.any():
        q[hit] = exact[hit].astype(float)
    return q


@dataclass(frozen=True)
class PanelMesh:
    """Panels [t_j, t_{j+1}] in a parameter t with p Gauss-Legendre nodes each.

    `x`, `dx` hold the physical abscissa and dx/dt at the nodes (shape
    (n_panels, p)); `x_breaks` holds x at the panel endpoints.
    """

    t_breaks: np.ndarray
    p: int
    x: np.ndarray
    dx: np.ndarray
    x_breaks: np.ndarray

    @property
    def n_panels(self) -> int:
        return len(self.t_breaks) - 1

    @property
    def half(self) -> np.ndarray:
        return 0.5 * np.diff(self.t_breaks)

    @property
    def t(self) -> np.ndarray:
        s, _ = gauss_legendre(self.p)
        mid = 0.5 * (self.t_breaks[1:] + self.t_breaks[:-1])
        return mid[:, None] + self.half[:, None] * s[None, :]

    def locate(self, tq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Panel index and local coordinate in [-1, 1] for parameter values."""
        tq = np.asarray(tq, dtype=float)
        j = np.clip(np.searchsorted(self.t_breaks, tq, side="right") - 1, 0, self.n_panels - 1)
        mid = 0.5 * (self.t_breaks[j] + self.t_breaks[j + 1])
        return j, (tq - mid) / self.half[j]

    def interpolate(self, values: np.ndarray, tq: np.ndarray) -> np.ndarray:
        """Spectral interpolation of nodal values (n_panels, p) at parameters tq."""
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        j, s = self.locate(tq)
        out = np.empty(tq.shape, dtype=values.dtype)
        for jj in np.unique(j):
            sel = j == jj
            out[sel] = interp_matrix(self.p, s[sel]) @ values[jj]
        return out


def build_mesh(t_breaks: np.ndarray, p: int, x_of_t, dx_of_t=None) -> PanelMesh:
    """Assemble a PanelMesh. With `dx_of_t` omitted the map is the identity."""
    t_breaks = np.asarray(t_breaks, dtype=float)
    s, _ = gauss_legendre(p)
    mid = 0.5 * (t_breaks[1:] + t_breaks[:-1])
    half = 0.5 * np.diff(t_breaks)
    t = mid[:, None] + half[:, None] * s[None, :]
    if dx_of_t is None:
        return PanelMesh(t_breaks, p, t, np.ones_like(t), t_breaks.copy())
    return PanelMesh(t_breaks, p, x_of_t(t), dx_of_t(t), x_of_t(t_breaks))


def graded_breaks(t0: float, t1: float, rate, cap: float, min_width: float = 1e-12) -> np.ndarray:
    """Breakpoints from t0 to t1 with local width cap / rate(t).

    `rate` is a vectorised bound on |d(log u0)/dt|; panel widths shrink where
    the homogeneous solution varies quickly.
    """
    out = [t0]
    t = t0
    span = t1 - t0
    while t < t1:
        r = float(rate(np.array([t]))[0])
        h = cap / max(r, 1e-300)
        # look ahead so the width also respects the rate at the far end
        r2 = float(rate(np.array([min(t + h, t1)]))[0])
        h = min(h, cap / max(r2, 1e-300), span)
        h = max(h, min_width)
        t = min(t + h, t1)
        if t1 - t < 1e-3 * h:
            t = t1
        out.append(t)
    return np.array(out)


def panel_integrate(mesh: PanelMesh, values: np.ndarray) -> complex:
    """Integral over the whole mesh (in the physical variable)."""
    _, w = gauss_legendre(mesh.p)
    return np.sum(mesh.half[:, None] * w[None, :] * mesh.dx * values)
