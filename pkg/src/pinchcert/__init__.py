"""Construction and numerical certification of almost-flat solvable-group
quotients whose curvature-diameter product drops below 12/n^2."""

from __future__ import annotations

__version__ = "0.1.0"

from .certify import (
    SCHEMA,
    Certificate,
    ErrorRow,
    canonical_dumps,
    certify_dimension,
    rows_to_csv,
    rows_to_json,
    table,
)
from .curvature import (
    CurvatureReport,
    Plane,
    analytic_bound,
    max_abs_curvature,
    sectional_curvature,
)
from .exactalg import (
    IntMatrix,
    IntPoly,
    PolySpec,
    build_polynomial,
    charpoly_exact,
    companion_matrix,
    det_exact,
    is_unimodular,
)
from .quotient import (
    DiameterBound,
    LatticeData,
    conjugator,
    diameter_upper,
    fiber_diameter_upper,
    lattice_invariance_check,
    sampled_diameter,
)
from .solvgroup import (
    BlockGenerator,
    GroupElement,
    TangentVector,
    assemble_generator,
    commutator,
    exp_generic,
    exp_tA_closed,
    identity_element,
    inverse,
    metric_at,
    multiply,
)
from .spectra import (
    LOG_Y_PLUS,
    SpectralBound,
    Spectrum,
    check_not_nilcoverable,
    cross_check_roots,
    nilcover_witness,
    roots_closed_form,
    roots_iterative,
    verify_spectral_bound,
)

__all__ = [
    "__version__",
    "SCHEMA",
    "Certificate",
    "ErrorRow",
    "canonical_dumps",
    "certify_dimension",
    "rows_to_csv",
    "rows_to_json",
    "table",
    "CurvatureReport",
    "Plane",
    "analytic_bound",
    "max_abs_curvature",
    "sectional_curvature",
    "IntMatrix",
    "IntPoly",
    "PolySpec",
    "build_polynomial",
    "charpoly_exact",
    "companion_matrix",
    "det_exact",
    "is_unimodular",
    "DiameterBound",
    "LatticeData",
    "conjugator",
    "diameter_upper",
    "fiber_diameter_upper",
    "lattice_invariance_check",
    "sampled_diameter",
    "BlockGenerator",
    "GroupElement",
    "TangentVector",
    "assemble_generator",
    "commutator",
    "exp_generic",
    "exp_tA_closed",
    "identity_element",
    "inverse",
    "metric_at",
    "multiply",
    "LOG_Y_PLUS",
    "SpectralBound",
    "Spectrum",
    "check_not_nilcoverable",
    "cross_check_roots",
    "nilcover_witness",
    "roots_closed_form",
    "roots_iterative",
    "verify_spectral_bound",
]
