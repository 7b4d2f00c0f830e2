"""
Heat lift with zero Dirichlet trace.

The forcing is extended oddly in x_n over the extension box, the whole-space
multiplier 1 / (ik + |xi|^2 + kappa^2) is applied per full spatial mode, and the
sine series is evaluated back on the normal grid. The boundary value vanishes by
odd symmetry.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from periodic_stokes.exceptions import PreconditionError
from periodic_stokes.solvers.data import SolverOptions
from periodic_stokes.solvers.extension import ExtensionLattice, NormalSeries
from periodic_stokes.spectral_core import (
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    forward_transform,
    inverse_transform,
    is_negligible,
    remove_nyquist,
)

logger = logging.getLogger(__name__)


def lattice_samples(
    values: np.ndarray, grid: TorusPlaneGrid, lattice: ExtensionLattice
) -> np.ndarray:
    """Values on the embedded uniform lattice, zero-padded to the extension box."""
    samples = np.take(values, grid.lattice_indices, axis=grid.node_axis)
    return lattice.pad(samples, grid.node_axis)


def require_oscillatory(spec: SpectralField, what: str) -> None:
    if not is_negligible(spec.values[0], spec.values):
        raise PreconditionError(f"{what} needs purely oscillatory data; the time mean is nonzero")


def require_steady(spec: SpectralField, what: str) -> None:
    if not is_negligible(spec.values[1:], spec.values):
        raise PreconditionError(f"{what} needs time-independent data")


class HeatLift(BaseModel):
    """The lifted field on the normal grid and its sine series on the extension box."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    field: SpectralField
    series: NormalSeries

    def divergence_samples(self) -> np.ndarray:
        """div v on the extension lattice, shaped with a single trailing component."""
        grid = self.field.grid
        nodes = self.series.lattice.nodes
        values = self.series.evaluate(nodes, 0)
        normal = self.series.evaluate(nodes, 1)[..., grid.n - 1 : grid.n]
        total = normal
        for j, xi in enumerate(grid.derivative_wavenumbers()):
            total = total + 1j * xi * values[..., j : j + 1]
        return total


def heat_lift(
    f: SpectralField, options: SolverOptions | None = None, steady: bool = False
) -> HeatLift:
    """
    Solve d_t v - Laplace v = f (or -Laplace v = f when ``steady``) with v = 0 on x_n = 0.

    Args:
        f (SpectralField): Forcing coefficients, purely oscillatory unless ``steady``.
        options (SolverOptions, optional): Extension box settings.
        steady (bool): Solve the time-independent (Poisson) problem instead.
    """
    options = options or SolverOptions()
    grid = f.grid
    if steady:
        require_steady(f, "The steady lift")
    else:
        require_oscillatory(f, "The heat lift")

    lattice = ExtensionLattice.for_grid(grid, options.extension_factor)
    series = NormalSeries.from_samples(
        lattice_samples(f.values, grid, lattice), lattice, "odd", grid.node_axis
    )
    k, _ = grid.mode_axes()
    kappa = series.kappa(f.values.ndim)
    denominator = (0.0 if steady else 1j * k) + grid.xi_norm() ** 2 + kappa**2
    safe = np.where(denominator == 0.0, 1.0, denominator)
    lifted = series.with_coefficients(np.where(denominator == 0.0, 0.0, series.coefficients / safe))

    values, first, second = lifted.profiles(grid.nodes)
    field = SpectralField(
        grid=grid,
        values=values,
        components=f.components,
        normal_derivatives=(first, second),
    )
    logger.debug(f"Heat lift over {lattice.total_cells} extension cells (steady={steady})")
    return HeatLift(field=field, series=lifted)


def solve_heat_dirichlet_zero(
    f: PhysicalField, options: SolverOptions | None = None
) -> PhysicalField:
    """Purely oscillatory heat lift of physical forcing samples."""
    spec = remove_nyquist(forward_transform(f))
    return inverse_transform(heat_lift(spec, options).field)
