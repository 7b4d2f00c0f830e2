"""
Numerical uniqueness: two solves of the same data through different lifting paths.

The interior stages are run once on the extension box [0, X_max] and once on
[0, 2 X_max]. Both results solve the same problem, so their velocities agree and
their pressures differ at most by a function of time.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from periodic_stokes.exceptions import GridError
from periodic_stokes.solvers import DataBundle, SolverOptions, solve_bundle
from periodic_stokes.spectral_core import (
    TorusPlaneGrid,
    lebesgue_values,
    spectral_derivative,
    stack_components,
)
from periodic_stokes.spectral_core.transforms import inverse_values

logger = logging.getLogger(__name__)

UNIQUENESS_TOLERANCE = 1e-8


class UniquenessReport(BaseModel):
    """L^q norms of u1 - u2 and of the tangential and normal gradients of p1 - p2."""

    model_config = ConfigDict(frozen=True)

    q: float
    extension_factors: tuple[int, int]
    velocity: float = Field(..., ge=0.0)
    pressure_gradient_tangential: float = Field(..., ge=0.0)
    pressure_gradient_normal: float = Field(..., ge=0.0)

    @property
    def worst(self) -> float:
        return max(self.velocity, self.pressure_gradient_tangential, self.pressure_gradient_normal)

    def passes(self, tolerance: float = UNIQUENESS_TOLERANCE) -> bool:
        return self.worst < tolerance


def uniqueness_check(
    bundle: DataBundle,
    grid: TorusPlaneGrid | None = None,
    options: SolverOptions | None = None,
    q: float = 2.0,
) -> UniquenessReport:
    """
    Solve ``bundle`` with extension factors 1 and 2 and compare the results.

    Raises:
        GridError: ``grid`` is given and differs from the grid of the bundle.
    """
    grid = grid or bundle.grid
    if not grid.matches(bundle.grid):
        raise GridError(f"Bundle lives on {bundle.grid.describe()}, not {grid.describe()}")
    options = options or SolverOptions()
    factors = (1, 2)
    first, second = (
        solve_bundle(bundle, options.model_copy(update={"extension_factor": factor}))
        for factor in factors
    )

    def norm(values: np.ndarray) -> float:
        return lebesgue_values(inverse_values(values, grid), grid, q)

    velocity = first.velocity_spectral - second.velocity_spectral
    pressure = first.pressure_spectral - second.pressure_spectral
    tangential = stack_components(
        [spectral_derivative(pressure, j) for j in range(grid.plane_dims)]
    )
    normal = spectral_derivative(pressure, "normal")
    report = UniquenessReport(
        q=q,
        extension_factors=factors,
        velocity=norm(velocity.values),
        pressure_gradient_tangential=norm(tangential.values),
        pressure_gradient_normal=norm(normal.values),
    )
    logger.info(
        f"Uniqueness: |u1 - u2|={report.velocity:.3e} "
        f"|grad' (p1 - p2)|={report.pressure_gradient_tangential:.3e} "
        f"|d_n (p1 - p2)|={report.pressure_gradient_normal:.3e}"
    )
    return report
