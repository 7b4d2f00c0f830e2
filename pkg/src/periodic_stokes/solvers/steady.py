"""
Steady Stokes problem in the half-space.

    -Laplace v + grad Pi = f0,    div v = g0,    v = h0 on x_n = 0

Solved in three stages at k = 0: a Poisson lift with zero trace, the divergence
corrector, and the boundary profiles for the remaining trace.
"""

from __future__ import annotations

import logging

import numpy as np

from periodic_stokes.exceptions import GridError
from periodic_stokes.solvers.boundary import steady_boundary_stage
from periodic_stokes.solvers.corrector import divergence_corrector
from periodic_stokes.solvers.data import BoundaryData, SolverOptions, StageFields, StokesSolution
from periodic_stokes.solvers.extension import ExtensionLattice
from periodic_stokes.solvers.heat import heat_lift, lattice_samples, require_steady
from periodic_stokes.spectral_core import (
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    forward_transform,
    is_negligible,
    remove_nyquist,
    trace,
)

logger = logging.getLogger(__name__)


def interior_stages(
    f: SpectralField,
    g: SpectralField,
    options: SolverOptions,
    steady: bool,
) -> tuple[StageFields, StageFields]:
    """
    Lift of the forcing and divergence corrector for one time regime.

    Zero forcing skips the lift. A divergence residual that cancels to roundoff against
    the data (g and the divergence of the lift) skips the corrector; the spatial-mean
    check is measured against that same data scale.

    Returns:
        tuple[StageFields, StageFields]: The lift (zero pressure) and the corrector.
    """
    grid = f.grid
    lattice = ExtensionLattice.for_grid(grid, options.extension_factor)
    residual = lattice_samples(g.values, grid, lattice)
    scale = float(np.max(np.abs(residual))) if residual.size else 0.0
    if np.any(f.values):
        lift = heat_lift(f, options, steady=steady)
        pressure = SpectralField.zeros(grid, 1, twins=2)
        lift_stage = StageFields(velocity=lift.field, pressure=pressure)
        lifted = lift.divergence_samples()
        scale = max(scale, float(np.max(np.abs(lifted))) if lifted.size else 0.0)
        residual = residual - lifted
    else:
        logger.debug("Zero forcing, lift skipped")
        lift_stage = StageFields.zeros(grid)

    if not is_negligible(residual, scale):
        corrector = divergence_corrector(residual, grid, options, data_scale=scale)
    else:
        logger.debug("Zero divergence residual, corrector skipped")
        corrector = StageFields.zeros(grid)
    return lift_stage, corrector


def remaining_trace(h: SpectralField, corrector: StageFields) -> SpectralField:
    """Boundary data left for the boundary stage after subtracting the corrector trace."""
    return h - trace(corrector.velocity)


def steady_stages(
    f0: SpectralField,
    g0: SpectralField,
    h0: SpectralField,
    options: SolverOptions | None = None,
) -> dict[str, StageFields]:
    """Stage fields of the steady solve from time-independent coefficients."""
    options = options or SolverOptions()
    for part, name in ((f0, "f0"), (g0, "g0"), (h0, "h0")):
        require_steady(part, f"The steady solver ({name})")
    lift, corrector = interior_stages(f0, g0, options, steady=True)
    boundary = steady_boundary_stage(remaining_trace(h0, corrector), options)
    return {"lift": lift, "corrector": corrector, "boundary": boundary}


def _as_boundary(h0: BoundaryData | PhysicalField) -> BoundaryData:
    return h0 if isinstance(h0, BoundaryData) else BoundaryData(field=h0)


def solve_steady(
    f0: PhysicalField,
    g0: PhysicalField,
    h0: BoundaryData | PhysicalField,
    options: SolverOptions | None = None,
) -> tuple[PhysicalField, PhysicalField]:
    """
    Solve the steady half-space problem.

    The decaying solution is selected; the shear family (a_1 x_n, ..., a_{n-1} x_n, 0)
    and the additive pressure constant are fixed to zero.

    Args:
        f0 (PhysicalField): Time-independent forcing, n components.
        g0 (PhysicalField): Time-independent divergence, scalar.
        h0 (BoundaryData | PhysicalField): Time-independent Dirichlet data.
        options (SolverOptions, optional): Solver knobs.

    Returns:
        tuple[PhysicalField, PhysicalField]: Velocity v and pressure Pi.

    Raises:
        PreconditionError: Some input depends on time.
        CompatibilityError: hhat_n(0, 0) != 0 or the divergence data has a nonzero
          spatial mean.
    """
    solution = steady_solution(f0, g0, _as_boundary(h0), options)
    return solution.velocity, solution.pressure


def steady_null_family(grid: TorusPlaneGrid, a: list[float] | tuple[float, ...]) -> StokesSolution:
    """
    The shear flow v = (a_1 x_n, ..., a_{n-1} x_n, 0), Pi = 0.

    It solves the steady problem with zero data and is excluded from ``solve_steady``
    by the gauge a = 0.
    """
    if len(a) != grid.plane_dims:
        raise ValueError(f"`a` needs {grid.plane_dims} entries for n={grid.n}, got {len(a)}")
    x = grid.nodes
    shape = grid.shape(grid.n)
    values = np.zeros(shape, dtype=np.complex128)
    first = np.zeros(shape, dtype=np.complex128)
    for j, slope in enumerate(a):
        # only the (k, xi) = (0, 0) coefficient is nonzero
        values[(0,) * grid.n + (slice(None), j)] = slope * x
        first[(0,) * grid.n + (slice(None), j)] = slope
    velocity = SpectralField(
        grid=grid,
        values=values,
        components=grid.n,
        normal_derivatives=(first, np.zeros(shape, dtype=np.complex128)),
    )
    pressure = SpectralField.zeros(grid, 1, twins=2)
    return StokesSolution.from_spectral(velocity, pressure)


def steady_solution(
    f0: PhysicalField,
    g0: PhysicalField,
    h0: BoundaryData,
    options: SolverOptions | None = None,
) -> StokesSolution:
    """Like ``solve_steady`` but keeps the spectral twins and stage provenance."""
    grid = f0.grid
    if not (grid.matches(g0.grid) and grid.matches(h0.grid)):
        raise GridError("Steady data live on different grids")
    stages = steady_stages(
        remove_nyquist(forward_transform(f0)),
        remove_nyquist(forward_transform(g0)),
        remove_nyquist(h0.spectral),
        options,
    )
    return StokesSolution.from_stages(stages)

