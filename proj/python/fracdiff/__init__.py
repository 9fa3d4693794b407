"""Time-fractional nonlocal diffusion: discrete Caputo calculus, implicit solver, diagnostics."""

import json as _json

from ._core import (
    DomainError,
    FormatError,
    RegimeError,
    SolverError,
    caputo_quadrature,
    discrete_caputo,
    eigenmode_comparison,
    eigenmode_reference,
    energy_gap,
    interpolation_exponent,
    mittag_leffler,
)
from ._core import solve as _solve


def solve(config):
    """Solve from a configuration dict (or JSON text)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _solve(text)


__all__ = [
    "DomainError",
    "FormatError",
    "RegimeError",
    "SolverError",
    "caputo_quadrature",
    "discrete_caputo",
    "eigenmode_comparison",
    "eigenmode_reference",
    "energy_gap",
    "interpolation_exponent",
    "mittag_leffler",
    "solve",
]
