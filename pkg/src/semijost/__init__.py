"""Semiclassical Jost solutions and scattering data for exponentially decaying barriers."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    DomainError,
    PotentialSpec,
    SemiParams,
    SpecValidationError,
    TurningPointError,
    UnsupportedOrderError,
    derive_params,
    eval_potential,
    exponential_family,
    free_potential,
    regge_wheeler,
    solve_tortoise_r,
    tail_epsilon,
    turning_points,
)
from .scaled import Scaled  # noqa: E402
from .fundamental import JostBoundary, jost_boundary, large_nu_parts, small_nu_parts  # noqa: E402
from .oracle import OracleConfig, closed_form_exponential, integrate_jost, smatrix_oracle  # noqa: E402
from .scattering import (  # noqa: E402
    ScatteringResult,
    amplitudes,
    derivative_scaling_check,
    fit_exponents,
    spectral_measure,
    wkb_action,
    wronskians,
)

__all__ = [
    "DomainError", "PotentialSpec", "SemiParams", "SpecValidationError", "TurningPointError",
    "UnsupportedOrderError", "derive_params", "eval_potential", "exponential_family", "free_potential",
    "regge_wheeler", "solve_tortoise_r", "tail_epsilon", "turning_points", "Scaled", "JostBoundary",
    "jost_boundary", "large_nu_parts", "small_nu_parts", "OracleConfig", "closed_form_exponential",
    "integrate_jost", "smatrix_oracle", "ScatteringResult", "amplitudes", "derivative_scaling_check",
    "fit_exponents", "spectral_measure", "wkb_action", "wronskians",
]
