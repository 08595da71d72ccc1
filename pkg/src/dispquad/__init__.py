"""Dispersion-minimizing quadrature for C1 quadratic isogeometric analysis."""

from .assembly import (
    QuadraturePolicy,
    Stencil,
    SymBandMatrix,
    TensorProductOperator,
    assemble_1d,
    extract_stencil,
    optimal_blend_tau,
    policy_preset,
    policy_stencil,
    tensorize_2d,
    uniform_stencil,
)
from .derivation import (
    DerivationSystem,
    closed_form_solution,
    derive_rule,
    exactness_family,
    g25_system,
    newton,
    nq2_system,
)
from .dispersion import (
    DispersionSample,
    SeriesCoefficients,
    default_ladder,
    fit_error_order,
    series_coefficients,
    solve_dispersion,
    stop_band_cutoff,
)
from .eigen import (
    EigenPair,
    EigenReport,
    ModeError,
    error_report,
    error_report_2d_from_1d,
    exact_spectrum,
    l2_projection,
    solve_gevp,
    spectrum_2d_from_1d,
)
from .rules import (
    QuadratureRule,
    blend,
    catalog_rule,
    g25,
    gauss_legendre,
    gauss_lobatto,
    integrate,
    nq2,
)
from .splines import (
    BSplineSpace,
    KnotVector,
    build_knots,
    build_space,
    element_ranges,
    eval_basis,
)

__version__ = "0.1.0"
