"""Grid sweeps, row serialization and pipeline comparison."""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .config import SweepConfig, from_dict
from .fundamental import JostBoundary, jost_boundary, reflect_boundary, regime_of
from .oracle import closed_form_exponential, smatrix_oracle
from .params import PotentialSpec, derive_params
from .scattering import FitError, ScatteringResult, fit_exponent_data, scattering_result

FIELDS = ("E", "hbar", "alpha", "nu", "regime", "re_t", "im_t", "log10_abs_t",
          "re_r", "im_r", "unitarity_defect", "e00", "notes")
NUMERIC = tuple(f for f in FIELDS if f not in ("regime", "notes"))
TINY_T = 1e-300


@dataclass(frozen=True)
class SweepRow:
    E: float
    hbar: float
    alpha: float
    nu: float
    regime: str
    re_t: float | None = None
    im_t: float | None = None
    log10_abs_t: float | None = None
    re_r: float | None = None
    im_r: float | None = None
    unitarity_defect: float | None = None
    e00: float | None = None
    notes: str = ""

    @property
    def ok(self) -> bool:
        return self.log10_abs_t is not None

    def t_phase(self) -> float:
        return math.atan2(self.im_t, self.re_t)


@dataclass
class SweepTable:
    rows: list[SweepRow]
    config: SweepConfig
    fits: list[dict] = field(default_factory=list)


def _is_pure_exponential(spec: PotentialSpec) -> bool:
    c = spec.tail(1)
    return spec.family == "exponential" and c is not None and np.all(c[2:] == 0)


def _closed_form_boundary(params) -> JostBoundary:
    f, fp = closed_form_exponential(params, 0.0)
    return JostBoundary(f=f, f_prime=fp, S=math.nan, T=math.nan, c=math.nan, gamma_mod=math.nan,
                        regime=regime_of(params.nu), mode="closed_form", source="closed_form")


def scatter(spec: PotentialSpec, params, pipeline: str, cfg: SweepConfig | None = None) -> ScatteringResult:
    """ScatteringResult for one grid point through the chosen pipeline."""
    threshold = cfg.regime_threshold if cfg else 5.0
    if pipeline == "oracle":
        return smatrix_oracle(spec, params, cfg.oracle if cfg else None)
    if pipeline == "closed_form":
        if not _is_pure_exponential(spec):
            raise ValueError("closed_form pipeline needs the pure exponential potential")
        plus = _closed_form_boundary(params)
        return scattering_result(reflect_boundary(plus), plus, params)
    if spec.family == "free":
        raise ValueError("perturbative pipelines need a barrier with turning points")
    mode = "converged" if pipeline == "perturbative_converged" else "leading"
    plus = jost_boundary(spec, params, 1, mode, threshold)
    minus = reflect_boundary(plus) if spec.symmetric else jost_boundary(spec, params, -1, mode, threshold)
    return scattering_result(minus, plus, params)


def row_from_result(params, regime: str, res: ScatteringResult, notes: list[str]) -> SweepRow:
    lt = res.t.log10_abs()
    t = res.t.to_complex()
    if abs(t) < TINY_T:
        t = cmath.exp(1j * cmath.phase(res.t.mant))
        notes = notes + ["|t| below double range: re_t/im_t hold t/|t|"]
    return SweepRow(E=params.E, hbar=params.hbar, alpha=params.alpha, nu=params.nu, regime=regime,
                    re_t=t.real, im_t=t.imag, log10_abs_t=lt, re_r=res.r.real, im_r=res.r.imag,
                    unitarity_defect=res.unitarity_defect, e00=res.e_00, notes="; ".join(notes))


def compute_point(cfg: SweepConfig, E: float, hbar: float, spec: PotentialSpec | None = None):
    """One row; failures become notes instead of exceptions."""
    spec = spec or cfg.build_potential()
    params = derive_params(E, hbar)
    regime = regime_of(params.nu, cfg.regime_threshold)
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            res = scatter(spec, params, cfg.pipeline, cfg)
        except Exception as exc:  # noqa: BLE001 - isolation is the point
            return SweepRow(E=E, hbar=hbar, alpha=params.alpha, nu=params.nu, regime=regime,
                            notes=f"error: {type(exc).__name__}: {exc}"), None
    notes.extend(sorted({str(w.message) for w in caught}))
    if spec.family == "regge_wheeler" and cfg.pipeline.startswith("perturbative"):
        notes.append("f+ from direct integration (inverse-square side)")
    return row_from_result(params, regime, res, notes), res


def _worker(args):
    raw, E, hbar = args
    row, _ = compute_point(from_dict(raw), E, hbar)
    return row


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> SweepTable:
    """All (E, ħ) grid points, sorted lexicographically."""
    points = [(E, h) for E in cfg.E_grid for h in cfg.hbar_grid]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_worker, [(cfg.raw, E, h) for E, h in points]))
    else:
        spec = cfg.build_potential()
        rows = [compute_point(cfg, E, h, spec)[0] for E, h in points]
    rows.sort(key=lambda r: (r.E, r.hbar))
    table = SweepTable(rows=rows, config=cfg)
    if "fits" in cfg.outputs:
        table.fits = exponent_fits(table)
    return table


def exponent_fits(table: SweepTable, min_points: int = 5) -> list[dict]:
    """fit_exponents per energy over the ħ grid (rows without data are skipped)."""
    spec = table.config.build_potential()
    out = []
    for E in table.config.E_grid:
        rows = [r for r in table.rows if r.E == E and r.ok]
        entry = {"E": E, "S_fit": None, "S_wkb": None, "S_tilde_fit": None, "slope_error": None,
                 "r2": None, "r2_tilde": None, "notes": ""}
        try:
            if len(rows) < min_points:
                raise FitError(f"{len(rows)} usable hbar values, need {min_points}")
            fit = fit_exponent_data([r.hbar for r in rows], [r.log10_abs_t * math.log(10.0) for r in rows],
                                    [r.e00 for r in rows], spec, derive_params(E, rows[0].hbar))
            entry.update(asdict(fit))
        except Exception as exc:  # noqa: BLE001
            entry["notes"] = f"{type(exc).__name__}: {exc}"
        out.append(entry)
    return out


# ---------------------------------------------------------------------------
# serialization


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return f"{v:.17g}"


def to_csv(rows) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in FIELDS])
    return buf.getvalue()


def fits_to_csv(fits) -> str:
    cols = ("E", "S_fit", "S_wkb", "S_tilde_fit", "slope_error", "r2", "r2_tilde", "notes")
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for f in fits:
        w.writerow([_fmt(f.get(c)) for c in cols])
    return buf.getvalue()


def metadata(cfg: SweepConfig) -> dict:
    return {"toolkit": "semijost", "version": __version__, "config": cfg.raw}


def to_json(table: SweepTable) -> str:
    meta = metadata(table.config)
    if table.fits:
        meta["fits"] = table.fits
    doc = {"metadata": meta, "rows": [asdict(r) for r in table.rows]}
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _num(s: str):
    return None if s == "" else float(s)


def read_csv(text: str) -> list[SweepRow]:
    rd = csv.DictReader(io.StringIO(text))
    if tuple(rd.fieldnames or ()) != FIELDS:
        raise ValueError("CSV header does not match the sweep row fields")
    rows = []
    for d in rd:
        kw = {k: _num(d[k]) for k in NUMERIC}
        rows.append(SweepRow(regime=d["regime"], notes=d["notes"], **kw))
    return rows


def read_json(text: str) -> list[SweepRow]:
    doc = json.loads(text)
    return [SweepRow(**r) for r in doc["rows"]]


# ---------------------------------------------------------------------------
# comparison


class GridMismatchError(ValueError):
    pass


def _rel_t(a: SweepRow, b: SweepRow) -> float:
    dl = (a.log10_abs_t - b.log10_abs_t) * math.log(10.0)
    dp = a.t_phase() - b.t_phase()
    return abs(cmath.exp(complex(dl, dp)) - 1.0)


def _rel(a: complex, b: complex) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(b), 1e-300)


def compare_rows(rows_a, rows_b) -> dict:
    """Per-row relative differences of t, r, e00 with max/median summary."""
    ka = [(r.E, r.hbar) for r in rows_a]
    kb = [(r.E, r.hbar) for r in rows_b]
    if ka != kb:
        raise GridMismatchError("the two sweeps do not cover the same (E, hbar) grid")
    per_row = []
    for a, b in zip(rows_a, rows_b):
        d = {"E": a.E, "hbar": a.hbar, "dt": None, "dr": None, "de": None}
        if a.ok and b.ok:
            d["dt"] = _rel_t(a, b)
            d["dr"] = _rel(complex(a.re_r, a.im_r), complex(b.re_r, b.im_r))
            d["de"] = _rel(a.e00, b.e00)
        per_row.append(d)
    summary = {}
    for key in ("dt", "dr", "de"):
        vals = [d[key] for d in per_row if d[key] is not None]
        summary[key] = {"max": max(vals) if vals else None,
                        "median": float(np.median(vals)) if vals else None,
                        "missing": len(per_row) - len(vals)}
    return {"rows": per_row, "summary": summary}
