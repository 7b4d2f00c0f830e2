from periodic_stokes.verification.estimates import (
    BundleRecipe,
    DataTerm,
    EstimateRatioReport,
    EstimateRow,
    ResolutionComparison,
    data_norm,
    estimate_constant_sweep,
    estimate_row,
    random_ensemble,
    resolution_sweep,
    scale_bundle,
    solution_norm,
)
from periodic_stokes.verification.manufactured import (
    CATALOGUE,
    ManufacturedCase,
    RecoveryErrors,
    manufactured_solution,
    recovery_errors,
    stokes_operator,
)
from periodic_stokes.verification.oracle import (
    OracleProfiles,
    bvp_oracle,
    oracle_grid,
    oracle_reference,
    self_convergence_order,
)
from periodic_stokes.verification.residuals import OperatorNorms, ResidualReport, residual_check
from periodic_stokes.verification.suites import (
    SUITES,
    SuiteConfig,
    SuiteResult,
    Tolerances,
    oracle_modes,
    random_boundary_data,
    run_suite,
    run_suites,
)
from periodic_stokes.verification.uniqueness import UniquenessReport, uniqueness_check

__all__ = [
    "CATALOGUE",
    "SUITES",
    "BundleRecipe",
    "DataTerm",
    "EstimateRatioReport",
    "EstimateRow",
    "ManufacturedCase",
    "OperatorNorms",
    "OracleProfiles",
    "RecoveryErrors",
    "ResidualReport",
    "ResolutionComparison",
    "SuiteConfig",
    "SuiteResult",
    "Tolerances",
    "UniquenessReport",
    "bvp_oracle",
    "data_norm",
    "estimate_constant_sweep",
    "estimate_row",
    "manufactured_solution",
    "oracle_grid",
    "oracle_modes",
    "oracle_reference",
    "random_boundary_data",
    "random_ensemble",
    "recovery_errors",
    "residual_check",
    "resolution_sweep",
    "run_suite",
    "run_suites",
    "scale_bundle",
    "self_convergence_order",
    "solution_norm",
    "stokes_operator",
    "uniqueness_check",
]
