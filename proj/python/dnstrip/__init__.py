"""Spectral experiments on thin Dirichlet-Neumann strips."""

from ._core import (
    CurvatureProfile,
    InvalidInput,
    NumericalFailure,
    annulus_eigenvalues,
    bessel_j0_first_zero,
    count_bound_states,
    effective_eigenvalues,
    profile,
    resolvent_gaps,
    run_cli,
    strip_eigenvalues,
    sweep,
    transverse_nu,
)

__version__ = "0.1.0"

__all__ = [
    "CurvatureProfile",
    "InvalidInput",
    "NumericalFailure",
    "annulus_eigenvalues",
    "bessel_j0_first_zero",
    "count_bound_states",
    "effective_eigenvalues",
    "profile",
    "resolvent_gaps",
    "run_cli",
    "strip_eigenvalues",
    "sweep",
    "transverse_nu",
]
