"""Sweep configuration: a versioned JSON document checked against a shipped schema."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .oracle import OracleConfig
from .params import PotentialSpec, exponential_family, free_potential, regge_wheeler, validate_spec

SCHEMA_VERSION = 1
PIPELINES = ("oracle", "perturbative_converged", "perturbative_leading", "closed_form")

DEFAULT_TOLERANCES = {
    "unitarity_oracle": 1e-8,
    "unitarity_perturbative": 1e-6,
    "closed_form": 1e-8,
    "pipeline": 1e-6,
    "overlap": 1e-5,
    "wronskian_drift": 1e-8,
    "special_functions": 1e-10,
    "free_anchor": 1e-12,
}


class ConfigError(ValueError):
    """Unusable configuration (maps to exit status 2)."""


def _schema(name: str) -> dict:
    return json.loads(resources.files("semijost").joinpath("data", name).read_text())


def config_schema() -> dict:
    return _schema("config.schema.json")


def rows_schema() -> dict:
    return _schema("rows.schema.json")


def default_config_path() -> Path:
    return Path(str(resources.files("semijost").joinpath("data", "default.json")))


def expand_grid(spec) -> tuple[float, ...]:
    if isinstance(spec, list):
        vals = [float(v) for v in spec]
    else:
        lo, hi, n = float(spec["min"]), float(spec["max"]), int(spec["count"])
        if hi < lo:
            raise ConfigError("grid max below min")
        if spec.get("spacing", "linear") == "log":
            vals = list(np.geomspace(lo, hi, n))
        else:
            vals = list(np.linspace(lo, hi, n))
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise ConfigError("grid values must be positive and finite")
    return tuple(sorted(set(float(v) for v in vals)))


@dataclass(frozen=True)
class SweepConfig:
    raw: dict
    potential: dict
    E_grid: tuple[float, ...]
    hbar_grid: tuple[float, ...]
    pipeline: str = "oracle"
    outputs: tuple[str, ...] = ("t", "r", "e", "defect")
    format: str = "csv"
    regime_threshold: float = 5.0
    oracle: OracleConfig = field(default_factory=OracleConfig)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    figures: bool = False

    def build_potential(self) -> PotentialSpec:
        return build_potential(self.potential)

    def with_overrides(self, **kw) -> "SweepConfig":
        raw = copy.deepcopy(self.raw)
        raw.update({k: v for k, v in kw.items() if v is not None})
        return from_dict(raw)


def build_potential(p: dict) -> PotentialSpec:
    fam = p["family"]
    if fam == "exponential":
        spec = exponential_family(a=p.get("a", 1.0), coeffs=tuple(p.get("coeffs", ())), K=p.get("K", 4))
    elif fam == "regge_wheeler":
        spec = regge_wheeler(p.get("ell", 10), float(p.get("sigma", 0)), a=p.get("a", 1.0),
                             order=p.get("order", 64), K=p.get("K", 4))
    else:
        return free_potential()
    validate_spec(spec)
    return spec


def from_dict(raw: dict) -> SweepConfig:
    try:
        jsonschema.validate(raw, config_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config: {exc.message}") from None
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(raw.get("tolerances", {}))
    o = raw.get("oracle", {})
    oc = OracleConfig(rtol=o.get("rtol", 1e-12), drift_limit=o.get("drift_limit", 1e-8), x_cap=o.get("x_cap", 80.0))
    return SweepConfig(
        raw=copy.deepcopy(raw),
        potential=dict(raw["potential"]),
        E_grid=expand_grid(raw["E_grid"]),
        hbar_grid=expand_grid(raw["hbar_grid"]),
        pipeline=raw.get("pipeline", "oracle"),
        outputs=tuple(raw.get("outputs", ("t", "r", "e", "defect"))),
        format=raw.get("format", "csv"),
        regime_threshold=float(raw.get("regime_threshold", 5.0)),
        oracle=oc,
        tolerances=tol,
        figures=bool(raw.get("report", {}).get("figures", False)),
    )


def load_config(path) -> SweepConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    return from_dict(raw)
