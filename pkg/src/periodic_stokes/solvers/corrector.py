"""
Whole-space divergence corrector.

For G extended evenly in x_n, the Stokes system with data (0, G) on the extension box
is solved by

    w = -i xibar G / |xibar|^2,    pi = (ik + |xibar|^2) G / |xibar|^2

per full spatial mode xibar = (xi, kappa). Written in the cosine basis, the tangential
part of w is even and w_n is odd, so w_n vanishes on x_n = 0.
"""

import logging

import numpy as np

from periodic_stokes.exceptions import CompatibilityError
from periodic_stokes.solvers.data import SolverOptions, StageFields
from periodic_stokes.solvers.extension import ExtensionLattice, NormalSeries
from periodic_stokes.solvers.heat import lattice_samples, require_oscillatory
from periodic_stokes.spectral_core import (
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    forward_transform,
    inverse_transform,
)

logger = logging.getLogger(__name__)

TRACE_TOLERANCE = 1e-12


def _spatial_mean_violations(
    coefficients: np.ndarray,
    origin: np.ndarray,
    grid: TorusPlaneGrid,
    tolerance: float,
    scale: float,
) -> list[int]:
    at_origin = np.abs(np.where(origin, coefficients, 0.0))
    peaks = at_origin.reshape(grid.time_samples, -1).max(axis=1)
    return sorted(
        int(grid.time_indices[i]) for i in range(grid.time_samples) if peaks[i] > tolerance * scale
    )


def divergence_corrector(
    samples: np.ndarray,
    grid: TorusPlaneGrid,
    options: SolverOptions | None = None,
    data_scale: float | None = None,
) -> StageFields:
    """
    Correct the divergence residual G given on the extension lattice.

    Args:
        samples (np.ndarray): G on the extension lattice, shaped like a scalar field whose
          node axis holds the ``total_cells + 1`` lattice nodes.
        grid (TorusPlaneGrid): Grid to evaluate w and pi on.
        options (SolverOptions, optional): Extension settings and compatibility tolerance.
        data_scale (float, optional): Magnitude the spatial-mean check is measured
          against. Defaults to the largest coefficient of G; callers passing a residual
          left after cancellation should pass the size of the data it came from.

    Returns:
        StageFields: w (n components) and pi with analytic normal-derivative twins.
    """
    options = options or SolverOptions()
    lattice = ExtensionLattice.for_grid(grid, options.extension_factor)
    axis = grid.node_axis
    series = NormalSeries.from_samples(samples, lattice, "even", axis)
    c = series.coefficients

    k, _ = grid.mode_axes()
    xis = grid.derivative_wavenumbers()
    kappa = series.kappa(c.ndim)
    xibar2 = grid.xi_norm() ** 2 + kappa**2
    origin = np.broadcast_to(xibar2 == 0.0, c.shape)

    if data_scale is None:
        data_scale = float(np.max(np.abs(c))) if c.size else 0.0
    offending = _spatial_mean_violations(c, origin, grid, options.compat_tolerance, data_scale)
    if offending:
        raise CompatibilityError(
            f"Divergence data has a nonzero spatial mean at time modes k = {offending}",
            offending,
        )
    safe = np.where(xibar2 == 0.0, 1.0, xibar2)
    c = np.where(origin, 0.0, c)

    tangential = [series.with_coefficients(-1j * xi * c / safe) for xi in xis]
    normal = series.with_coefficients(kappa * c / safe, parity="odd")
    pressure = series.with_coefficients((1j * k + xibar2) * c / safe)

    x = grid.nodes
    parts = [t.profiles(x) for t in tangential] + [normal.profiles(x)]
    velocity = SpectralField(
        grid=grid,
        values=np.concatenate([p[0] for p in parts], axis=-1),
        components=grid.n,
        normal_derivatives=tuple(
            np.concatenate([p[d] for p in parts], axis=-1) for d in (1, 2)
        ),
    )
    p0, p1, p2 = pressure.profiles(x)
    pi = SpectralField(grid=grid, values=p0, components=1, normal_derivatives=(p1, p2))

    wall = np.abs(velocity.values[..., 0, grid.n - 1])
    if wall.size and float(wall.max()) > TRACE_TOLERANCE * max(float(np.abs(c).max()), 1.0):
        logger.warning(f"Corrector normal trace is {float(wall.max()):.3e}, expected 0")
    return StageFields(velocity=velocity, pressure=pi)


def solve_divergence_corrector(
    g_residual: PhysicalField, options: SolverOptions | None = None
) -> tuple[PhysicalField, PhysicalField]:
    """Corrector (w, pi) for a purely oscillatory divergence residual sampled on the grid."""
    grid = g_residual.grid
    spec = forward_transform(g_residual)
    require_oscillatory(spec, "The divergence corrector")
    lattice = ExtensionLattice.for_grid(grid, (options or SolverOptions()).extension_factor)
    stage = divergence_corrector(lattice_samples(spec.values, grid, lattice), grid, options)
    return inverse_transform(stage.velocity), inverse_transform(stage.pressure)
