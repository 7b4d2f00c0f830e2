from __future__ import annotations

from collections.abc import Sequence
from typing import Any, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from periodic_stokes.exceptions import GridError
from periodic_stokes.spectral_core.grid import TorusPlaneGrid


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def is_negligible(part: np.ndarray, reference: np.ndarray | float, rtol: float = 1e-12) -> bool:
    """True if ``part`` vanishes relative to the magnitude of ``reference``."""
    scale = float(np.max(np.abs(reference))) if np.size(reference) else 0.0
    peak = float(np.max(np.abs(part))) if np.size(part) else 0.0
    return peak <= rtol * scale


def check_same_grid(*fields: _Field) -> TorusPlaneGrid:
    grid = fields[0].grid
    for other in fields[1:]:
        if not grid.matches(other.grid):
            raise GridError(f"Grid mismatch: {grid.describe()} vs {other.grid.describe()}")
    return grid


class _Field(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TorusPlaneGrid
    values: np.ndarray
    components: int = Field(..., ge=1)
    on_boundary: bool = Field(False, description="Samples live on x_n = 0 only.")

    @property
    def expected_shape(self) -> tuple[int, ...]:
        return self.grid.shape(self.components, 1 if self.on_boundary else None)

    @model_validator(mode="after")
    def _check_shape(self) -> Self:
        if self.values.shape != self.expected_shape:
            raise GridError(
                f"Array shape {self.values.shape} does not match grid shape {self.expected_shape}"
            )
        _frozen(self.values)
        return self

    def replace(self, **update: Any) -> Self:
        data = {name: getattr(self, name) for name in type(self).model_fields}
        data.update(update)
        return type(self)(**data)

    def component(self, index: int) -> Self:
        return self.replace(values=self.values[..., index : index + 1], components=1)

    @property
    def node_axis(self) -> int:
        return self.grid.node_axis


class PhysicalField(_Field):
    """Real samples u(t, x', x_n) on the grid, last axis indexing components."""

    @field_validator("values", mode="before")
    @classmethod
    def _as_real(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.float64, copy=True)
        if not np.all(np.isfinite(array)):
            raise GridError("PhysicalField samples must be finite")
        return array

    @classmethod
    def zeros(cls, grid: TorusPlaneGrid, components: int, on_boundary: bool = False) -> Self:
        shape = grid.shape(components, 1 if on_boundary else None)
        return cls(
            grid=grid, values=np.zeros(shape), components=components, on_boundary=on_boundary
        )

    @classmethod
    def from_function(
        cls, grid: TorusPlaneGrid, function: Any, components: int, on_boundary: bool = False
    ) -> Self:
        """Sample ``function(t, x_1, ..., x_{n-1}, x_n)`` returning a list of component arrays."""
        axes = [grid.times] + [grid.tangential_points] * grid.plane_dims
        axes.append(grid.nodes[:1] if on_boundary else grid.nodes)
        mesh = np.meshgrid(*axes, indexing="ij")
        parts = function(*mesh)
        values = np.stack([np.broadcast_to(p, mesh[0].shape) for p in parts], axis=-1)
        return cls(grid=grid, values=values, components=components, on_boundary=on_boundary)

    def __add__(self, other: PhysicalField) -> PhysicalField:
        check_same_grid(self, other)
        return self.replace(values=self.values + other.values)

    def __sub__(self, other: PhysicalField) -> PhysicalField:
        check_same_grid(self, other)
        return self.replace(values=self.values - other.values)

    def __mul__(self, factor: float) -> PhysicalField:
        return self.replace(values=self.values * factor)

    __rmul__ = __mul__

    def __neg__(self) -> PhysicalField:
        return self.replace(values=-self.values)


class SpectralField(_Field):
    """
    Complex coefficients u(k, xi, x_n) in FFT index order.

    ``normal_derivatives`` optionally holds the first and second x_n-derivatives of
    the coefficient profiles, evaluated analytically by whoever produced the field.
    """

    normal_derivatives: tuple[np.ndarray, ...] = ()

    @field_validator("values", mode="before")
    @classmethod
    def _as_complex(cls, value: Any) -> np.ndarray:
        return np.array(value, dtype=np.complex128, copy=True)

    @field_validator("normal_derivatives", mode="before")
    @classmethod
    def _as_complex_tuple(cls, value: Any) -> tuple[np.ndarray, ...]:
        return tuple(np.array(v, dtype=np.complex128, copy=True) for v in value)

    @model_validator(mode="after")
    def _check_derivatives(self) -> Self:
        for derivative in self.normal_derivatives:
            if derivative.shape != self.values.shape:
                raise GridError(
                    f"Normal derivative shape {derivative.shape} does not match {self.values.shape}"
                )
            _frozen(derivative)
        return self

    @classmethod
    def zeros(
        cls, grid: TorusPlaneGrid, components: int, on_boundary: bool = False, twins: int = 0
    ) -> Self:
        shape = grid.shape(components, 1 if on_boundary else None)
        return cls(
            grid=grid,
            values=np.zeros(shape, dtype=np.complex128),
            components=components,
            on_boundary=on_boundary,
            normal_derivatives=tuple(np.zeros(shape, dtype=np.complex128) for _ in range(twins)),
        )

    def map(self, operation: Any) -> SpectralField:
        """Apply a linear coefficient map to the values and every normal-derivative twin."""
        return self.replace(
            values=operation(self.values),
            normal_derivatives=tuple(operation(d) for d in self.normal_derivatives),
        )

    def _combine(self, other: SpectralField, sign: float) -> SpectralField:
        check_same_grid(self, other)
        depth = min(len(self.normal_derivatives), len(other.normal_derivatives))
        return self.replace(
            values=self.values + sign * other.values,
            normal_derivatives=tuple(
                a + sign * b
                for a, b in zip(
                    self.normal_derivatives[:depth], other.normal_derivatives[:depth], strict=True
                )
            ),
        )

    def __add__(self, other: SpectralField) -> SpectralField:
        return self._combine(other, 1.0)

    def __sub__(self, other: SpectralField) -> SpectralField:
        return self._combine(other, -1.0)

    def __mul__(self, factor: complex) -> SpectralField:
        return self.map(lambda a: a * factor)

    __rmul__ = __mul__

    def __neg__(self) -> SpectralField:
        return self.map(np.negative)

    def component(self, index: int) -> SpectralField:
        return self.replace(
            values=self.values[..., index : index + 1],
            components=1,
            normal_derivatives=tuple(d[..., index : index + 1] for d in self.normal_derivatives),
        )


def stack_components(fields: Sequence[SpectralField]) -> SpectralField:
    """Concatenate fields along the component axis."""
    grid = check_same_grid(*fields)
    depth = min(len(f.normal_derivatives) for f in fields)
    return SpectralField(
        grid=grid,
        values=np.concatenate([f.values for f in fields], axis=-1),
        components=sum(f.components for f in fields),
        on_boundary=fields[0].on_boundary,
        normal_derivatives=tuple(
            np.concatenate([f.normal_derivatives[d] for f in fields], axis=-1) for d in range(depth)
        ),
    )
