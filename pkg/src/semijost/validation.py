"""Invariant suite behind `semijost validate`.

Each check returns a Check with the measured value, the threshold it was
held to and the verdict.  Checks never raise; an exception inside a check
is reported as a failure with the message in `detail`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import SweepConfig
from .fundamental import jost_boundary
from .oracle import OracleAccuracyError, closed_form_exponential, integrate_jost
from .params import derive_params
from .scattering import PrecisionWarning
from .special import airy, bessel_I_imag, bessel_I_integral
from .sweep import _is_pure_exponential, scatter


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    threshold: float
    passed: bool
    relation: str = "<="
    detail: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{verdict}  {self.name}: measured {self.measured:.3e} {self.relation} {self.threshold:.3e}{extra}"


def _le(name, measured, threshold, detail=""):
    ok = bool(math.isfinite(measured) and measured <= threshold)
    return Check(name, float(measured), float(threshold), ok, "<=", detail)


def _ge(name, measured, threshold, detail=""):
    ok = bool(math.isfinite(measured) and measured >= threshold)
    return Check(name, float(measured), float(threshold), ok, ">=", detail)


class _Grid:
    """Lazily computed oracle / perturbative results over the config grid."""

    def __init__(self, cfg: SweepConfig):
        self.cfg = cfg
        self.spec = cfg.build_potential()
        self.points = [(E, h) for E in cfg.E_grid for h in cfg.hbar_grid]
        self._cache: dict = {}

    def results(self, pipeline: str):
        if pipeline not in self._cache:
            out = []
            for E, h in self.points:
                p = derive_params(E, h)
                out.append((p, scatter(self.spec, p, pipeline, self.cfg)))
            self._cache[pipeline] = out
        return self._cache[pipeline]


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _t_rel(ra, rb) -> float:
    return abs((ra.t / rb.t).to_complex() - 1.0)


def check_unitarity(g: _Grid, pipeline: str, tol: float) -> Check:
    worst = max(res.unitarity_defect for _, res in g.results(pipeline))
    return _le(f"unitarity [{pipeline}]", worst, tol)


def check_pipeline_agreement(g: _Grid, tol: float) -> list[Check]:
    a, b = g.results("perturbative_converged"), g.results("oracle")
    dt = max(_t_rel(x, y) for (_, x), (_, y) in zip(a, b))
    dr = max(_rel(x.r, y.r) for (_, x), (_, y) in zip(a, b))
    de = max(_rel(x.e_00, y.e_00) for (_, x), (_, y) in zip(a, b))
    return [_le("perturbative vs oracle: t", dt, tol), _le("perturbative vs oracle: r", dr, tol),
            _le("perturbative vs oracle: e00", de, tol)]


def check_closed_form(g: _Grid, tol: float) -> list[Check]:
    worst_f, worst_t = 0.0, 0.0
    for (p, res), (_, cres) in zip(g.results("oracle"), g.results("closed_form")):
        f, _ = closed_form_exponential(p, 0.0)
        o = integrate_jost(g.spec, p, 1, 0.0, g.cfg.oracle)
        worst_f = max(worst_f, abs((o.f / f).to_complex() - 1.0))
        worst_t = max(worst_t, _t_rel(res, cres))
    return [_le("closed form vs oracle: f+(0)", worst_f, tol), _le("closed form vs oracle: t", worst_t, tol)]


def check_wronskian_bound(g: _Grid) -> Check:
    worst = math.inf
    for p, res in g.results("oracle"):
        ratio = math.exp(res.W_mp.log_abs() - math.log(2.0 * p.E / p.hbar))
        worst = min(worst, ratio)
    return _ge("|W(f-,f+)| / (2E/hbar)", worst, 1.0)


def check_drift(g: _Grid, tol: float) -> Check:
    worst = 0.0
    loose = type(g.cfg.oracle)(rtol=g.cfg.oracle.rtol, drift_limit=math.inf, x_cap=g.cfg.oracle.x_cap)
    for E, h in g.points:
        p = derive_params(E, h)
        sides = (1,) if g.spec.symmetric else (1, -1)
        for s in sides:
            worst = max(worst, integrate_jost(g.spec, p, s, 0.0, loose).wronskian_drift)
    return _le("oracle Wronskian drift", worst, tol)


def check_sign(g: _Grid) -> Check:
    worst = min(-res.e_00 for _, res in g.results("oracle"))
    return Check("-e00 > 0 on the grid", float(worst), 0.0, bool(worst > 0), ">")


def check_free_anchor(tol: float) -> Check:
    from .params import free_potential
    from .oracle import smatrix_oracle

    p = derive_params(0.25, 0.5)
    res = smatrix_oracle(free_potential(), p)
    return _le("free anchor e = -hbar/(2E)", abs(res.e_00 + p.hbar / (2 * p.E)), tol)


def check_special(tol: float) -> list[Check]:
    x = np.linspace(-20.0, 20.0, 101)
    a = airy(x, scaled=True)
    wr = a.ai * a.bi_prime - a.ai_prime * a.bi
    airy_err = float(np.max(np.abs(wr - 1.0 / math.pi)))
    worst = 0.0
    for nu in (0.0, 0.5, 1.0, 2.0, 5.0):
        for w in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
            b = bessel_I_imag(nu, w)
            series = complex(b.value[0]) * math.exp(float(b.exponent[0]))
            worst = max(worst, _rel(bessel_I_integral(nu, w), series))
    pair = 0.0
    for w in (0.5, 2.0, 8.0):
        bp, bm = bessel_I_imag(1.0, w, 1), bessel_I_imag(1.0, w, -1)
        scale = math.exp(float(bp.exponent[0]) + float(bm.exponent[0]))
        W = w * (complex(bm.value[0]) * complex(bp.derivative[0]) - complex(bm.derivative[0]) * complex(bp.value[0]))
        pair = max(pair, _rel(W * scale, 2j / math.pi * math.sinh(math.pi)))
    return [_le("Airy Wronskian = 1/pi", airy_err, 1e-12),
            _le("I_{i nu}: series vs integral", worst, tol),
            _le("W(sqrt(w) I_{-i nu}, sqrt(w) I_{i nu})", pair, tol)]


def check_overlap(g: _Grid, tol: float) -> Check:
    if g.spec.family == "free":
        return Check("regime overlap", 0.0, tol, True, "<=", "skipped for the free potential")
    worst = 0.0
    h = 0.05
    for nu in (3.0, 5.0, 7.0):
        p = derive_params(0.5 * nu * h, h)
        s = g.spec if g.spec.tail(1) is not None else g.spec.reflected()
        a = jost_boundary(s, p, 1, "converged", threshold=1e9)
        b = jost_boundary(s, p, 1, "converged", threshold=0.0)
        worst = max(worst, abs((a.f / b.f).to_complex() - 1.0))
    return _le("small/large nu overlap on nu in [3,7]", worst, tol)


def check_determinism(g: _Grid) -> Check:
    from .sweep import compute_point

    E, h = g.points[0]
    r1, _ = compute_point(g.cfg, E, h, g.spec)
    r2, _ = compute_point(g.cfg, E, h, g.spec)
    return Check("repeatable grid point", 0.0 if r1 == r2 else 1.0, 0.0, r1 == r2, "==")


def _guard(fn: Callable, name: str):
    try:
        out = fn()
        return out if isinstance(out, list) else [out]
    except OracleAccuracyError as exc:
        return [Check(name, math.inf, 0.0, False, "<=", str(exc))]
    except Exception as exc:  # noqa: BLE001 - failures are report content
        return [Check(name, math.nan, 0.0, False, "<=", f"{type(exc).__name__}: {exc}")]


def run_validation(cfg: SweepConfig) -> list[Check]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        return _run(cfg)


def _run(cfg: SweepConfig) -> list[Check]:
    tol = cfg.tolerances
    g = _Grid(cfg)
    free = g.spec.family == "free"
    checks: list[Check] = []
    checks += _guard(lambda: check_special(tol["special_functions"]), "special functions")
    checks += _guard(lambda: check_free_anchor(tol["free_anchor"]), "free anchor")
    checks += _guard(lambda: check_unitarity(g, "oracle", tol["unitarity_oracle"]), "unitarity [oracle]")
    checks += _guard(lambda: check_drift(g, tol["wronskian_drift"]), "oracle Wronskian drift")
    if not free:
        checks += _guard(lambda: check_unitarity(g, "perturbative_converged", tol["unitarity_perturbative"]),
                         "unitarity [perturbative_converged]")
        checks += _guard(lambda: check_pipeline_agreement(g, tol["pipeline"]), "perturbative vs oracle")
        checks += _guard(lambda: check_wronskian_bound(g), "Wronskian bound")
        checks += _guard(lambda: check_sign(g), "spectral measure sign")
        checks += _guard(lambda: check_overlap(g, tol["overlap"]), "regime overlap")
    if _is_pure_exponential(g.spec):
        checks += _guard(lambda: check_closed_form(g, tol["closed_form"]), "closed form vs oracle")
    checks += _guard(lambda: check_determinism(g), "repeatable grid point")
    return checks
