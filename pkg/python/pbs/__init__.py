"""pbs: pseudo-bosonic ladder operators, bi-coherent states and their verification."""

from .bicoherent import (
    BcsState,
    TailBoundError,
    asymptotic_check,
    bcs_state,
    eigen_residual,
    norm_formula,
    normalization,
    radius_estimate,
    resolution_check,
    resolution_plan,
)
from .config import Config, ConfigError, load_config
from .exprlang import (
    Expr,
    ExprDomainError,
    ExprSyntaxError,
    conjugate,
    differentiate,
    evaluate,
    parse,
    to_text,
)
from .polyengine import (
    ScaledPoly,
    hermite_eval,
    hermite_log_eval,
    laguerre_neg_sq,
    pn_sequence,
)
from .quadrature import (
    NON_INTEGRABLE,
    QuadratureSpec,
    l2_norm_sq,
    moment_check,
    pair_inner,
    test_inner,
)
from .report import CheckRecord, VerificationReport, emit, from_json
from .states import (
    FamilyMismatchError,
    SideMismatchError,
    StateFn,
    apply_ladder,
    apply_number,
    eigenstate,
    factorize,
    metric_multiplier,
)
from .superpotential import (
    BoundedPhiRequiredError,
    PbsFamily,
    build_family,
    classify_integrability,
    hamiltonian_data,
    preset_family,
    sup_norm_bounds,
    vacuum,
    validate_pbs,
)
from .weakstates import (
    TestFunction,
    V0MembershipError,
    continuity_probe,
    quasi_basis_convergence,
    quasi_basis_partial_sums,
    v0_membership,
    weak_eigen_check,
    weak_functional,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BcsState",
    "BoundedPhiRequiredError",
    "CheckRecord",
    "Config",
    "ConfigError",
    "Expr",
    "ExprDomainError",
    "ExprSyntaxError",
    "FamilyMismatchError",
    "NON_INTEGRABLE",
    "PbsFamily",
    "QuadratureSpec",
    "ScaledPoly",
    "SideMismatchError",
    "StateFn",
    "TailBoundError",
    "TestFunction",
    "V0MembershipError",
    "VerificationReport",
    "apply_ladder",
    "apply_number",
    "asymptotic_check",
    "bcs_state",
    "build_family",
    "classify_integrability",
    "conjugate",
    "continuity_probe",
    "differentiate",
    "eigen_residual",
    "eigenstate",
    "emit",
    "evaluate",
    "factorize",
    "from_json",
    "hamiltonian_data",
    "hermite_eval",
    "hermite_log_eval",
    "laguerre_neg_sq",
    "l2_norm_sq",
    "load_config",
    "metric_multiplier",
    "moment_check",
    "norm_formula",
    "normalization",
    "pair_inner",
    "parse",
    "pn_sequence",
    "preset_family",
    "quasi_basis_convergence",
    "quasi_basis_partial_sums",
    "radius_estimate",
    "resolution_check",
    "resolution_plan",
    "sup_norm_bounds",
    "test_inner",
    "to_text",
    "vacuum",
    "v0_membership",
    "validate_pbs",
    "weak_eigen_check",
    "weak_functional",
]
