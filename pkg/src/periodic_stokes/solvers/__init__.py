from periodic_stokes.solvers.boundary import (
    mode_profiles,
    oscillatory_boundary_stage,
    oscillatory_profiles,
    pressure_gradient_split,
    solve_boundary_oscillatory,
    steady_boundary_stage,
    steady_profiles,
)
from periodic_stokes.solvers.corrector import divergence_corrector, solve_divergence_corrector
from periodic_stokes.solvers.data import (
    BoundaryData,
    DataBundle,
    SolverOptions,
    StageFields,
    StokesSolution,
    sum_stages,
    time_shift,
)
from periodic_stokes.solvers.extension import ExtensionLattice, NormalSeries
from periodic_stokes.solvers.full import solve_bundle, solve_full
from periodic_stokes.solvers.heat import HeatLift, heat_lift, solve_heat_dirichlet_zero
from periodic_stokes.solvers.steady import (
    solve_steady,
    steady_null_family,
    steady_solution,
)

__all__ = [
    "BoundaryData",
    "DataBundle",
    "ExtensionLattice",
    "HeatLift",
    "NormalSeries",
    "SolverOptions",
    "StageFields",
    "StokesSolution",
    "divergence_corrector",
    "heat_lift",
    "mode_profiles",
    "oscillatory_boundary_stage",
    "oscillatory_profiles",
    "pressure_gradient_split",
    "solve_boundary_oscillatory",
    "solve_bundle",
    "solve_divergence_corrector",
    "solve_full",
    "solve_heat_dirichlet_zero",
    "solve_steady",
    "steady_boundary_stage",
    "steady_null_family",
    "steady_profiles",
    "steady_solution",
    "sum_stages",
    "time_shift",
]
