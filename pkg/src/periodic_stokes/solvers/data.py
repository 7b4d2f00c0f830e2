from __future__ import annotations

import logging
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from periodic_stokes.exceptions import GridError
from periodic_stokes.spectral_core import (
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    forward_transform,
    inverse_transform,
)

logger = logging.getLogger(__name__)

COMPAT_TOLERANCE = 1e-10


class SolverOptions(BaseModel):
    """Knobs shared by every solver stage."""

    model_config = ConfigDict(frozen=True)

    perturb_q0: bool = Field(False, description="Flip the tangential term of q0 (fault injection).")
    extension_factor: int = Field(
        1, ge=1, description="Extension box length for the interior stages, in units of X_max."
    )
    compat_tolerance: float = Field(
        COMPAT_TOLERANCE, gt=0, description="Relative tolerance of the compatibility checks."
    )


def offending_frequencies(
    spectral: SpectralField, component: int, tolerance: float = COMPAT_TOLERANCE
) -> list[int]:
    """Time mode indices k != 0 whose xi = 0 coefficient of ``component`` is nonzero."""
    grid = spectral.grid
    origin = (slice(None),) + (0,) * grid.plane_dims
    at_origin = spectral.values[origin][..., component]
    scale = float(np.max(np.abs(spectral.values))) if spectral.values.size else 0.0
    peaks = np.max(np.abs(at_origin), axis=-1)
    return sorted(
        int(grid.time_indices[i])
        for i in range(grid.time_samples)
        if grid.time_indices[i] != 0 and peaks[i] > tolerance * scale
    )


class BoundaryData(BaseModel):
    """
    Dirichlet data h on T x R^{n-1}: n components sampled on x_n = 0.

    ``compat_normal`` records whether hhat_n(k, xi = 0) vanishes for every k != 0.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    field: PhysicalField

    @model_validator(mode="after")
    def _check_field(self) -> BoundaryData:
        if not self.field.on_boundary:
            raise GridError("BoundaryData needs a field sampled on x_n = 0")
        if self.field.components != self.field.grid.n:
            raise GridError(
                f"BoundaryData needs {self.field.grid.n} components, got {self.field.components}"
            )
        return self

    @classmethod
    def create(cls, field: PhysicalField | SpectralField) -> BoundaryData:
        physical = inverse_transform(field) if isinstance(field, SpectralField) else field
        return cls(field=physical)

    @classmethod
    def zeros(cls, grid: TorusPlaneGrid) -> BoundaryData:
        return cls(field=PhysicalField.zeros(grid, grid.n, on_boundary=True))

    @property
    def grid(self) -> TorusPlaneGrid:
        return self.field.grid

    @cached_property
    def spectral(self) -> SpectralField:
        return forward_transform(self.field)

    @cached_property
    def offending_frequencies(self) -> list[int]:
        return offending_frequencies(self.spectral, self.grid.n - 1)

    @property
    def compat_normal(self) -> bool:
        return not self.offending_frequencies


class DataBundle(BaseModel):
    """Forcing f (n components), divergence g (scalar) and boundary data h on one grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    f: PhysicalField
    g: PhysicalField
    h: BoundaryData

    @model_validator(mode="after")
    def _check_bundle(self) -> DataBundle:
        grid = self.f.grid
        if self.f.components != grid.n or self.g.components != 1:
            raise GridError(
                f"Bundle needs f with {grid.n} components and scalar g, got "
                f"{self.f.components} and {self.g.components}"
            )
        if not (grid.matches(self.g.grid) and grid.matches(self.h.grid)):
            raise GridError("Bundle fields live on different grids")
        return self

    @classmethod
    def zeros(cls, grid: TorusPlaneGrid) -> DataBundle:
        return cls(
            f=PhysicalField.zeros(grid, grid.n),
            g=PhysicalField.zeros(grid, 1),
            h=BoundaryData.zeros(grid),
        )

    @property
    def grid(self) -> TorusPlaneGrid:
        return self.f.grid

    def is_zero(self) -> bool:
        return not (np.any(self.f.values) or np.any(self.g.values) or np.any(self.h.field.values))

    def scaled(self, factor: float) -> DataBundle:
        return DataBundle(
            f=self.f * factor,
            g=self.g * factor,
            h=BoundaryData(field=self.h.field * factor),
        )

    def shifted(self, steps: int) -> DataBundle:
        """Translate the data in time by whole time steps."""
        return DataBundle(
            f=time_shift(self.f, steps),
            g=time_shift(self.g, steps),
            h=BoundaryData(field=time_shift(self.h.field, steps)),
        )

    def __add__(self, other: DataBundle) -> DataBundle:
        return DataBundle(
            f=self.f + other.f,
            g=self.g + other.g,
            h=BoundaryData(field=self.h.field + other.h.field),
        )


def time_shift(field: PhysicalField, steps: int) -> PhysicalField:
    """Samples of u(t - steps * dt) on the same grid."""
    return field.replace(values=np.roll(field.values, steps, axis=0))


class StageFields(BaseModel):
    """Velocity and pressure contributed by one solver stage."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    velocity: SpectralField
    pressure: SpectralField

    @classmethod
    def zeros(cls, grid: TorusPlaneGrid) -> StageFields:
        return cls(
            velocity=SpectralField.zeros(grid, grid.n, twins=2),
            pressure=SpectralField.zeros(grid, 1, twins=2),
        )

    def __add__(self, other: StageFields) -> StageFields:
        return StageFields(
            velocity=self.velocity + other.velocity, pressure=self.pressure + other.pressure
        )


def sum_stages(stages: dict[str, StageFields]) -> StageFields:
    parts = list(stages.values())
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


class StokesSolution(BaseModel):
    """
    Velocity and pressure of a solve, with their spectral twins and stage provenance.

    ``stages`` maps ``steady``, ``heat_lift``, ``corrector`` and ``boundary`` to the
    fields each stage contributed; the solution is their sum.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    velocity: PhysicalField
    pressure: PhysicalField
    velocity_spectral: SpectralField
    pressure_spectral: SpectralField
    stages: dict[str, StageFields] = Field(default_factory=dict)

    @classmethod
    def from_stages(cls, stages: dict[str, StageFields]) -> StokesSolution:
        total = sum_stages(stages)
        return cls.from_spectral(total.velocity, total.pressure, stages)

    @classmethod
    def from_spectral(
        cls,
        velocity: SpectralField,
        pressure: SpectralField,
        stages: dict[str, StageFields] | None = None,
    ) -> StokesSolution:
        return cls(
            velocity=inverse_transform(velocity),
            pressure=inverse_transform(pressure),
            velocity_spectral=velocity,
            pressure_spectral=pressure,
            stages=stages or {"total": StageFields(velocity=velocity, pressure=pressure)},
        )

    @property
    def grid(self) -> TorusPlaneGrid:
        return self.velocity.grid
