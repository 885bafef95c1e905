"""Exact-arithmetic solvers for univariate truncated moment problems with rational data."""
from .hankel import MomentSequence, build_hankel, generating_polynomial, localizing_matrix, psd_status, riesz
from .kset import ClosedSet, classify, natural_description, pi_products
from .polyalg import Poly
from .rational import (
    PoleSpec,
    RationalMoments,
    partial_fractions,
    power_to_rational,
    rational_moments_of,
    rational_to_power,
    solve_rtmp,
    verify_rtmp,
)
from .solver import (
    AtomicMeasure,
    InfeasibleReason,
    PoleSet,
    SolverConfig,
    SolverError,
    extension_region,
    positivity_certificate,
    prescribed_atom_quadrature,
    solve,
    solve_nonsingular,
    solve_singular,
    verify_measure,
)
from .special import (
    BivariateSequence,
    CircleMeasure,
    circle_solve,
    circle_to_univariate,
    circle_verify,
    strong_hamburger_solve,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "BivariateSequence",
    "CircleMeasure",
    "ClosedSet",
    "InfeasibleReason",
    "MomentSequence",
    "PoleSet",
    "PoleSpec",
    "Poly",
    "RationalMoments",
    "SolverConfig",
    "SolverError",
    "build_hankel",
    "circle_solve",
    "circle_to_univariate",
    "circle_verify",
    "classify",
    "extension_region",
    "generating_polynomial",
    "localizing_matrix",
    "natural_description",
    "partial_fractions",
    "pi_products",
    "positivity_certificate",
    "power_to_rational",
    "prescribed_atom_quadrature",
    "psd_status",
    "rational_moments_of",
    "rational_to_power",
    "riesz",
    "solve",
    "solve_nonsingular",
    "solve_rtmp",
    "solve_singular",
    "strong_hamburger_solve",
    "verify_measure",
    "verify_rtmp",
]
