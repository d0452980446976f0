"""Metriplectic dynamics in three dimensions: x' = P dH + g dS."""

from .dynamics import (
    DiagnosticSample,
    MetriplecticSystem,
    NonCasimirWarning,
    diagnose,
    rest_state,
    xi_field,
)
from .fields import PoissonField, ScalarField, verify_casimir
from .metric import build_g, dissipation_rate, g_apply, rank_check, sigma
from .systems import SystemSpec, builtin, list_builtins

__version__ = "0.1.0"

__all__ = [
    "DiagnosticSample",
    "MetriplecticSystem",
    "NonCasimirWarning",
    "PoissonField",
    "ScalarField",
    "SystemSpec",
    "build_g",
    "builtin",
    "diagnose",
    "dissipation_rate",
    "g_apply",
    "list_builtins",
    "rank_check",
    "rest_state",
    "sigma",
    "verify_casimir",
    "xi_field",
]
