"""
Odd and even extension of lattice samples in x_n.

Samples on the uniform lattice {j X / M} are zero-padded to the extension box
[0, E X] and expanded in sin(kappa_m x) (odd extension) or cos(kappa_m x) (even
extension) with kappa_m = m pi / (E X). The series are then evaluated, together with
their x_n-derivatives, at arbitrary nodes.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import Literal

import numpy as np
import scipy.fft
from pydantic import BaseModel, ConfigDict, Field

from periodic_stokes.config import fft_workers
from periodic_stokes.spectral_core import TorusPlaneGrid

logger = logging.getLogger(__name__)

type Parity = Literal["odd", "even"]

DECAY_WARNING = 1e-10


def _real_transform(
    transform: Callable[..., np.ndarray], values: np.ndarray, axis: int
) -> np.ndarray:
    real = transform(np.ascontiguousarray(values.real), type=1, axis=axis, workers=fft_workers())
    imag = transform(np.ascontiguousarray(values.imag), type=1, axis=axis, workers=fft_workers())
    return real + 1j * imag


class ExtensionLattice(BaseModel):
    """The uniform lattice of the extension box [0, factor * X_max]."""

    model_config = ConfigDict(frozen=True)

    x_max: float = Field(..., gt=0)
    cells: int = Field(..., ge=2, description="Lattice cells inside [0, X_max].")
    factor: int = Field(1, ge=1)

    @classmethod
    def for_grid(cls, grid: TorusPlaneGrid, factor: int = 1) -> ExtensionLattice:
        return cls(x_max=grid.x_max, cells=grid.lattice_cells, factor=factor)

    @property
    def total_cells(self) -> int:
        return self.cells * self.factor

    @property
    def length(self) -> float:
        return self.x_max * self.factor

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.total_cells + 1) * (self.x_max / self.cells)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(self.total_cells + 1) * (np.pi / self.length)

    def pad(self, samples: np.ndarray, axis: int) -> np.ndarray:
        """Zero-pad lattice samples on [0, X_max] to the extension box."""
        extra = self.total_cells - self.cells
        if extra == 0:
            return samples
        widths = [(0, 0)] * samples.ndim
        widths[axis] = (0, extra)
        return np.pad(samples, widths)


class NormalSeries(BaseModel):
    """Coefficients of a sine or cosine series in x_n, stored along ``axis``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    parity: Parity
    lattice: ExtensionLattice
    coefficients: np.ndarray
    axis: int

    @classmethod
    def from_samples(
        cls, samples: np.ndarray, lattice: ExtensionLattice, parity: Parity, axis: int
    ) -> NormalSeries:
        """
        Expand samples on the full extension lattice (``lattice.total_cells + 1`` nodes).

        Odd series drop the endpoint samples, which the sine basis forces to zero.
        """
        total = lattice.total_cells
        scale = float(np.max(np.abs(samples))) if samples.size else 0.0
        tail = np.take(samples, [lattice.cells], axis=axis)
        if scale > 0.0 and float(np.max(np.abs(tail))) > DECAY_WARNING * scale:
            logger.warning(
                f"{parity} extension of data not decayed at X_max "
                f"(tail {float(np.max(np.abs(tail))):.3e} of {scale:.3e})"
            )
        if parity == "odd":
            interior = np.take(samples, np.arange(1, total), axis=axis)
            inner = _real_transform(scipy.fft.dst, interior, axis) / total
            widths = [(0, 0)] * samples.ndim
            widths[axis] = (1, 1)
            coefficients = np.pad(inner, widths)
        elif parity == "even":
            coefficients = _real_transform(scipy.fft.dct, samples, axis) / total
            index = [slice(None)] * samples.ndim
            for end in (0, total):
                index[axis] = end
                coefficients[tuple(index)] *= 0.5
        else:
            raise ValueError(f"Unsupported parity: {parity}")
        return cls(parity=parity, lattice=lattice, coefficients=coefficients, axis=axis)

    def with_coefficients(
        self, coefficients: np.ndarray, parity: Parity | None = None
    ) -> NormalSeries:
        return NormalSeries(
            parity=parity or self.parity,
            lattice=self.lattice,
            coefficients=coefficients,
            axis=self.axis,
        )

    def basis(self, x: np.ndarray, derivative: int = 0) -> np.ndarray:
        """Matrix B[j, m] = d^derivative/dx^derivative of the m-th basis function at x_j."""
        kappa = self.lattice.wavenumbers
        phase = np.outer(x, kappa) + derivative * np.pi / 2.0
        wave = np.sin(phase) if self.parity == "odd" else np.cos(phase)
        return wave * kappa**derivative

    def evaluate(self, x: np.ndarray, derivative: int = 0) -> np.ndarray:
        """Series (or its x_n-derivative) at the nodes ``x``, placed back on ``axis``."""
        matrix = self.basis(np.asarray(x, dtype=np.float64), derivative)
        moved = np.moveaxis(self.coefficients, self.axis, -1)
        return np.moveaxis(moved @ matrix.T, -1, self.axis)

    def profiles(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values with first and second x_n-derivatives at ``x``."""
        return self.evaluate(x, 0), self.evaluate(x, 1), self.evaluate(x, 2)

    def kappa(self, ndim: int) -> np.ndarray:
        """Wavenumbers shaped to broadcast along ``axis`` of an ``ndim`` array."""
        shape = [1] * ndim
        shape[self.axis] = self.lattice.total_cells + 1
        return self.lattice.wavenumbers.reshape(shape)
