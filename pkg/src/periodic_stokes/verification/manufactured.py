"""
Manufactured solutions.

Every recipe fixes an analytic (u*, p*) built from trigonometric time factors, tangential
plane waves and decaying x_n-profiles, and derives the data (f*, g*, h*) from it with
``stokes_operator``. Interior forcing is odd and the divergence data even in x_n, so the
reflected interior stages resolve them exactly.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict

from periodic_stokes.exceptions import ManufacturedError
from periodic_stokes.solvers import (
    BoundaryData,
    DataBundle,
    StokesSolution,
    oscillatory_profiles,
    steady_profiles,
)
from periodic_stokes.spectral_core import (
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    divergence,
    forward_transform,
    gradient,
    gradient_norm,
    inverse_transform,
    laplacian,
    lebesgue_values,
    spectral_derivative,
    stack_components,
    trace,
)

logger = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-10

type Sampler = Callable[[np.ndarray, list[np.ndarray], np.ndarray, int], list[np.ndarray]]


def stokes_operator(
    u: SpectralField, p: SpectralField
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """(d_t u - Laplace u + grad p, div u, trace u) computed spectrally."""
    momentum = spectral_derivative(u, "time") - laplacian(u) + stack_components(gradient(p))
    return momentum, divergence(u), trace(u)


def _gauss(x: np.ndarray, d: int) -> np.ndarray:
    """d-th derivative of e^{-x^2/2}."""
    g = np.exp(-0.5 * x**2)
    return (g, -x * g, (x**2 - 1.0) * g)[d]


def _odd_gauss(x: np.ndarray, d: int) -> np.ndarray:
    """d-th derivative of x e^{-x^2/2}."""
    g = np.exp(-0.5 * x**2)
    return (x * g, (1.0 - x**2) * g, (x**3 - 3.0 * x) * g)[d]


def _narrow_gauss(x: np.ndarray, d: int) -> np.ndarray:
    """d-th derivative of e^{-x^2}."""
    g = np.exp(-(x**2))
    return (g, -2.0 * x * g, (4.0 * x**2 - 2.0) * g)[d]


def _analytic(grid: TorusPlaneGrid, components: int, sampler: Sampler) -> SpectralField:
    """Coefficients of a sampled field with exact first and second x_n-derivatives."""
    parts = []
    for d in range(3):
        physical = PhysicalField.from_function(
            grid, lambda t, *xs, d=d: sampler(t, list(xs[:-1]), xs[-1], d), components
        )
        parts.append(forward_transform(physical).values)
    return SpectralField(
        grid=grid, values=parts[0], components=components, normal_derivatives=tuple(parts[1:])
    )


def _zero_fields(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    return SpectralField.zeros(grid, grid.n, twins=2), SpectralField.zeros(grid, 1, twins=2)


def _zero(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    return _zero_fields(grid)


def _pressure_pulse(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    u, _ = _zero_fields(grid)
    omega = grid.frequency

    def pressure(t: np.ndarray, xs: list[np.ndarray], xn: np.ndarray, d: int) -> list[np.ndarray]:
        return [np.sin(omega * t) if d == 0 else 0.0 * t]

    return u, _analytic(grid, 1, pressure)


def _swirl_sampler(grid: TorusPlaneGrid, steady: bool) -> Sampler:
    omega, xi = grid.frequency, grid.wavenumber

    def velocity(t: np.ndarray, xs: list[np.ndarray], xn: np.ndarray, d: int) -> list[np.ndarray]:
        shear = 1.0 if steady else np.sin(omega * t)
        wave = np.cos(xi * xs[0]) * (1.0 if steady else np.cos(omega * t))
        profile = _odd_gauss(xn, d)
        return [shear * profile] + [wave * profile for _ in range(grid.n - 1)]

    return velocity


def _single_mode_swirl(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    _, p = _zero_fields(grid)
    return _analytic(grid, grid.n, _swirl_sampler(grid, steady=False)), p


def _steady_swirl(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    _, p = _zero_fields(grid)
    return _analytic(grid, grid.n, _swirl_sampler(grid, steady=True)), p


def _pressure_column(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    u, _ = _zero_fields(grid)
    omega = grid.frequency

    def pressure(t: np.ndarray, xs: list[np.ndarray], xn: np.ndarray, d: int) -> list[np.ndarray]:
        return [np.sin(omega * t) * _gauss(xn, d)]

    return u, _analytic(grid, 1, pressure)


def _steady_pressure(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    u, _ = _zero_fields(grid)

    def pressure(t: np.ndarray, xs: list[np.ndarray], xn: np.ndarray, d: int) -> list[np.ndarray]:
        return [_narrow_gauss(xn, d) + 0.0 * t]

    return u, _analytic(grid, 1, pressure)


def _boundary_layer(grid: TorusPlaneGrid, steady: bool) -> tuple[SpectralField, SpectralField]:
    """Real part of a single-mode boundary-driven solution at xi = (2 xi_1, 0, ...)."""
    k = 0.0 if steady else grid.frequency
    xis = [np.asarray(2.0 * grid.wavenumber)] + [np.asarray(0.0)] * (grid.plane_dims - 1)
    tangential = [np.asarray(1.0 + 0.0j)] + [np.asarray(0.5j)] * (grid.plane_dims - 1)
    normal = np.asarray(0.5 + 0.25j)

    def profiles(xn: np.ndarray) -> tuple[list[tuple[np.ndarray, ...]], tuple[np.ndarray, ...]]:
        if steady:
            return steady_profiles(xis, tangential, normal, xn)
        return oscillatory_profiles(np.asarray(k), xis, tangential, normal, xn)

    def phase(t: np.ndarray, xs: list[np.ndarray]) -> np.ndarray:
        return np.exp(1j * (k * t + float(xis[0]) * xs[0]))

    def velocity(t: np.ndarray, xs: list[np.ndarray], xn: np.ndarray, d: int) -> list[np.ndarray]:
        parts, _ = profiles(xn)
        return [np.real(part[d] * phase(t, xs)) for part in parts]

    def pressure(t: np.ndarray, xs: list[np.ndarray], xn: np.ndarray, d: int) -> list[np.ndarray]:
        _, part = profiles(xn)
        return [np.real(part[d] * phase(t, xs))]

    return _analytic(grid, grid.n, velocity), _analytic(grid, 1, pressure)


COMPOSITE_PARTS = (
    "single-mode-swirl",
    "pressure-column",
    "boundary-layer",
    "steady-swirl",
    "steady-pressure",
    "steady-boundary-layer",
)


def _composite(grid: TorusPlaneGrid) -> tuple[SpectralField, SpectralField]:
    u, p = _zero_fields(grid)
    for name in COMPOSITE_PARTS:
        part_u, part_p = CATALOGUE[name](grid)
        u, p = u + part_u, p + part_p
    return u, p


CATALOGUE: dict[str, Callable[[TorusPlaneGrid], tuple[SpectralField, SpectralField]]] = {
    "zero": _zero,
    "pressure-pulse": _pressure_pulse,
    "single-mode-swirl": _single_mode_swirl,
    "pressure-column": _pressure_column,
    "boundary-layer": lambda grid: _boundary_layer(grid, steady=False),
    "steady-swirl": _steady_swirl,
    "steady-pressure": _steady_pressure,
    "steady-boundary-layer": lambda grid: _boundary_layer(grid, steady=True),
    "composite": _composite,
}


class ManufacturedCase(BaseModel):
    """A manufactured solution together with the data it induces."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    recipe: str
    velocity: SpectralField
    pressure: SpectralField
    bundle: DataBundle

    @property
    def solution(self) -> StokesSolution:
        return StokesSolution.from_spectral(self.velocity, self.pressure)


class RecoveryErrors(BaseModel):
    """Velocity and pressure-gradient errors of a solve against a manufactured case."""

    model_config = ConfigDict(frozen=True)

    recipe: str
    velocity: float
    pressure_gradient: float
    relative: bool

    @property
    def worst(self) -> float:
        return max(self.velocity, self.pressure_gradient)


def _check_tail(recipe: str, fields: dict[str, PhysicalField]) -> None:
    for name, field in fields.items():
        scale = float(np.max(np.abs(field.values))) if field.values.size else 0.0
        if scale == 0.0 or field.on_boundary:
            continue
        tail = float(np.max(np.abs(field.values[..., -1, :])))
        if tail > TAIL_TOLERANCE * scale:
            raise ManufacturedError(
                f"Recipe {recipe!r} has not decayed at X_max: {name} tail {tail:.3e} "
                f"of {scale:.3e}"
            )


def manufactured_solution(recipe: str, grid: TorusPlaneGrid) -> ManufacturedCase:
    """
    Build the catalogue recipe ``recipe`` on ``grid``.

    Raises:
        ManufacturedError: Unknown recipe, or u*, f* or g* above 1e-10 of their peak at X_max.
    """
    try:
        build = CATALOGUE[recipe]
    except KeyError as e:
        raise ManufacturedError(
            f"Unknown recipe {recipe!r}; choose one of {sorted(CATALOGUE)}"
        ) from e
    u, p = build(grid)
    f, g, h = stokes_operator(u, p)
    bundle = DataBundle(
        f=inverse_transform(f.replace(normal_derivatives=())),
        g=inverse_transform(g.replace(normal_derivatives=())),
        h=BoundaryData(field=inverse_transform(h)),
    )
    _check_tail(recipe, {"u*": inverse_transform(u), "f*": bundle.f, "g*": bundle.g})
    logger.debug(f"Manufactured {recipe!r} on {grid.describe()}")
    return ManufacturedCase(recipe=recipe, velocity=u, pressure=p, bundle=bundle)


def recovery_errors(
    solution: StokesSolution, case: ManufacturedCase, q: float = 2.0
) -> RecoveryErrors:
    """
    ||u - u*|| and ||grad(p - p*)|| in L^q, relative to ||u*|| and ||grad p*|| when
    those are positive.
    """
    grid = case.velocity.grid
    difference = solution.velocity_spectral - case.velocity
    velocity_error = lebesgue_values(inverse_transform(difference).values, grid, q)
    pressure_error = gradient_norm(solution.pressure_spectral - case.pressure, q)
    velocity_scale = lebesgue_values(inverse_transform(case.velocity).values, grid, q)
    pressure_scale = gradient_norm(case.pressure, q)
    relative = velocity_scale > 0.0 or pressure_scale > 0.0
    return RecoveryErrors(
        recipe=case.recipe,
        velocity=velocity_error / velocity_scale if velocity_scale > 0.0 else velocity_error,
        pressure_gradient=(
            pressure_error / pressure_scale if pressure_scale > 0.0 else pressure_error
        ),
        relative=relative,
    )
