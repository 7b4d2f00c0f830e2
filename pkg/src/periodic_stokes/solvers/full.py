"""
The full inhomogeneous time-periodic problem.

    d_t u - Laplace u + grad p = f,    div u = g,    u = h on x_n = 0

The data are split into their time mean and purely oscillatory parts. The mean goes
through the steady solver; the oscillatory part through the heat lift v, the corrector
(w, pi) for G = g - div v and the boundary solver for H = h - trace(w).
"""

from __future__ import annotations

import logging

import numpy as np

from periodic_stokes.exceptions import CompatibilityError, GridError
from periodic_stokes.solvers.boundary import oscillatory_boundary_stage
from periodic_stokes.solvers.data import (
    BoundaryData,
    DataBundle,
    SolverOptions,
    StageFields,
    StokesSolution,
    sum_stages,
)
from periodic_stokes.solvers.steady import interior_stages, remaining_trace, steady_stages
from periodic_stokes.spectral_core import (
    PhysicalField,
    forward_transform,
    project_oscillatory,
    project_steady,
    remove_nyquist,
)

logger = logging.getLogger(__name__)


def solve_full(
    f: PhysicalField,
    g: PhysicalField,
    h: BoundaryData | PhysicalField,
    options: SolverOptions | None = None,
) -> StokesSolution:
    """
    Solve the time-periodic half-space problem for data (f, g, h).

    Args:
        f (PhysicalField): Forcing, n components.
        g (PhysicalField): Prescribed divergence, scalar.
        h (BoundaryData | PhysicalField): Dirichlet data on x_n = 0.
        options (SolverOptions, optional): Solver knobs.

    Returns:
        StokesSolution: u and p with stage provenance under ``steady``, ``heat_lift``,
        ``corrector`` and ``boundary``.

    Raises:
        GridError: The data live on different grids.
        CompatibilityError: hhat_n(k, 0) != 0 for some k != 0, or the divergence data
          have a nonzero spatial mean.
    """
    options = options or SolverOptions()
    boundary = h if isinstance(h, BoundaryData) else BoundaryData(field=h)
    grid = f.grid
    if not (grid.matches(g.grid) and grid.matches(boundary.grid)):
        raise GridError("Solver data live on different grids")
    if not boundary.compat_normal:
        raise CompatibilityError(
            "Boundary data h_n has nonzero tangential mean at time modes "
            f"k = {boundary.offending_frequencies}",
            boundary.offending_frequencies,
        )

    f_spec = remove_nyquist(forward_transform(f))
    g_spec = remove_nyquist(forward_transform(g))
    h_spec = remove_nyquist(boundary.spectral)

    stages: dict[str, StageFields] = {}
    f0, g0, h0 = project_steady(f_spec), project_steady(g_spec), project_steady(h_spec)
    if np.any(f0.values) or np.any(g0.values) or np.any(h0.values):
        stages["steady"] = sum_stages(steady_stages(f0, g0, h0, options))
    else:
        logger.debug("Zero time mean, steady stage skipped")
        stages["steady"] = StageFields.zeros(grid)

    f1, g1 = project_oscillatory(f_spec), project_oscillatory(g_spec)
    stages["heat_lift"], stages["corrector"] = interior_stages(f1, g1, options, steady=False)

    remaining = remaining_trace(project_oscillatory(h_spec), stages["corrector"])
    if np.any(remaining.values):
        stages["boundary"] = oscillatory_boundary_stage(remaining, options)
    else:
        logger.debug("Zero oscillatory boundary data, boundary stage skipped")
        stages["boundary"] = StageFields.zeros(grid)

    logger.info(f"Solved on {grid.describe()}")
    return StokesSolution.from_stages(stages)


def solve_bundle(bundle: DataBundle, options: SolverOptions | None = None) -> StokesSolution:
    return solve_full(bundle.f, bundle.g, bundle.h, options)