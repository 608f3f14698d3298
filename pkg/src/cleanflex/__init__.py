"""Clean flexes of periodic functions and the convex-curve results built on them."""

from .census import (
    BoseTally,
    CensusReport,
    Check,
    bose_tally,
    clean_flex_census,
    corpus,
    operator_sign_change_check,
    random_antiperiodic,
    random_fourier,
    sign_change_count,
)
from .chebyshev import (
    DisconjugateOperator,
    HermiteData,
    SpaceDescriptor,
    TrigPoly,
    apply_disconjugate,
    count_zeros,
    disconjugate_operator,
    evaluate,
    hermite_interpolate,
)
from .curves import (
    Conic,
    SextacticRecord,
    SupportCurve,
    VertexRecord,
    curvature_radius,
    curve_from_support,
    doubly_tangent_conic,
    osculating_conic,
    sextactic_scan,
    vertex_scan,
)
from .errors import *  # noqa: F401,F403
from .funcmodel import (
    DEFAULT_GRID,
    Arc,
    FourierFunction,
    GridProfile,
    PeriodicFunction,
    catalog,
    evaluate_with_derivatives,
    find_zeros,
    near_zero_components,
    section2_example,
    sup_of_ratio,
)
from .osculation import (
    ContactProfile,
    FlexRecord,
    axiom_audit,
    classify_flex,
    contact_profile,
    flex_scan,
    minimal_function,
    osculating_polynomial,
)

__version__ = "0.1.0"
