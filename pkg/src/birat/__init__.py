"""Birational and symplectic discretizations of quadratic vector fields."""

from .errors import (
    BiratError,
    ConstraintViolation,
    DegenerateLinearTerm,
    DenominatorVanishes,
    DimensionMismatch,
    DomainError,
    NotASteadyState,
    NotBirational,
    PoleAtTwoOverH,
    PoleError,
    SingularImplicitSystem,
    SingularStepMatrix,
)
from .quadvf import QuadraticVectorField
from .kahan import (
    KahanStepConfig,
    kahan_inverse_step,
    kahan_step,
    kahan_step_series,
    map_multipliers_at_fixed_point,
    multiplier_of_eigenvalue,
    rk_equivalence_residual,
)
from .ratpoly import MultiPoly, parse_poly, perfect_square_root
from .lvfamily import (
    CASE_VI_SCHEME,
    KAHAN_SCHEME,
    MICKENS_SCHEME,
    ClassificationReport,
    LVParams,
    SymbolicCertificate,
    case_iv_blend,
    check_sympcon,
    classify_birational,
    classify_params,
    classify_symplectic,
    invert_params,
    lv_hamiltonian,
    lv_inverse_step,
    lv_step,
    symbolic_certificate,
    symplectic_residual,
)
from .geomcheck import OrbitVerdict, Trajectory

__version__ = "0.1.0"
