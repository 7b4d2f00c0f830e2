"""
Discretization of the time-periodic half-space T x R^{n-1} x R_+.
"""

from __future__ import annotations

import logging
from functools import cached_property
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from periodic_stokes.exceptions import GridError

logger = logging.getLogger(__name__)

type Grading = Literal["graded", "uniform"]


class TorusPlaneGrid(BaseModel):
    """
    Tensor grid of time samples, tangential samples and normal nodes.

    Time carries 2K+1 equispaced samples on [0, tau), so the resolved temporal
    frequencies are exactly k in {-K, ..., K} * (2 pi / tau). Each tangential axis
    carries N equispaced samples on [0, L). The normal grid always contains the
    uniform lattice {j X_max / M : j = 0..M}, which the interior stages use as
    their extension lattice.
    """

    model_config = ConfigDict(frozen=True)

    tau: float = Field(..., gt=0, description="Time period.")
    n: int = Field(..., ge=2, description="Spatial dimension of the half-space.")
    time_modes: int = Field(..., ge=1, description="Largest resolved time mode index K.")
    tangential_modes: int = Field(
        ..., ge=2, description="Samples N per tangential axis of the periodic box."
    )
    length: float = Field(..., gt=0, description="Tangential box length L.")
    normal_grid: tuple[float, ...] = Field(..., description="Normal nodes, starting at 0.")
    lattice_cells: int = Field(..., ge=1, description="Cells M of the embedded uniform lattice.")

    @model_validator(mode="after")
    def _check_normal_grid(self) -> TorusPlaneGrid:
        nodes = np.asarray(self.normal_grid, dtype=np.float64)
        if nodes.size < 2:
            raise GridError(f"`normal_grid` needs at least two nodes, got {nodes.size}")
        if not np.all(np.isfinite(nodes)):
            raise GridError("`normal_grid` contains non-finite nodes")
        if nodes[0] != 0.0:
            raise GridError(f"`normal_grid` must start at 0, got {nodes[0]!r}")
        if np.any(np.diff(nodes) <= 0.0):
            raise GridError("`normal_grid` must be strictly increasing")
        if self.lattice_cells > nodes.size - 1:
            raise GridError(
                f"`lattice_cells`={self.lattice_cells} exceeds the "
                f"{nodes.size - 1} cells of the grid"
            )
        lattice = np.linspace(0.0, nodes[-1], self.lattice_cells + 1)
        index = np.searchsorted(nodes, lattice).clip(0, nodes.size - 1)
        if np.max(np.abs(nodes[index] - lattice)) > 1e-12 * nodes[-1]:
            raise GridError(
                f"`normal_grid` does not contain the uniform lattice of {self.lattice_cells} cells"
            )
        return self

    @classmethod
    def create(
        cls,
        tau: float = 2.0 * np.pi,
        n: int = 2,
        time_modes: int = 16,
        tangential_modes: int = 64,
        length: float = 2.0 * np.pi,
        x_max: float = 20.0,
        nodes: int = 128,
        grading: Grading = "graded",
        ratio: float = 1.08,
        first_cell: float | None = None,
    ) -> TorusPlaneGrid:
        """
        Build a grid with a uniform or geometrically graded normal direction.

        Args:
            tau (float): Time period.
            n (int): Spatial dimension.
            time_modes (int): Largest time mode index K.
            tangential_modes (int): Samples per tangential axis.
            length (float): Tangential box length.
            x_max (float): Far end of the normal grid.
            nodes (int): Target node count of the normal grid, including x_n = 0.
            grading (str): ``"graded"`` merges a geometric refinement toward x_n = 0
              into the lattice, ``"uniform"`` uses the lattice alone.
            ratio (float): Growth ratio of the geometric refinement.
            first_cell (float, optional): First refinement cell, ``x_max / 1e4`` by default.
        """
        if x_max <= 0 or not np.isfinite(x_max):
            raise GridError(f"`x_max` must be positive and finite, got {x_max!r}")
        if nodes < 3:
            raise GridError(f"`nodes` must be at least 3, got {nodes}")

        if grading == "uniform":
            normal, cells = np.linspace(0.0, x_max, nodes), nodes - 1
        elif grading == "graded":
            if ratio <= 1.0:
                raise GridError(f"`ratio` must exceed 1, got {ratio!r}")
            first = x_max / 1e4 if first_cell is None else first_cell
            normal, cells = _graded_nodes(x_max, nodes, ratio, first)
            if normal.size < nodes:
                logger.warning(
                    f"Graded normal grid realized {normal.size} of {nodes} nodes "
                    f"(lattice of {cells} cells)"
                )
        else:
            raise GridError(f"Unsupported grading: {grading}")

        return cls(
            tau=tau,
            n=n,
            time_modes=time_modes,
            tangential_modes=tangential_modes,
            length=length,
            normal_grid=tuple(float(x) for x in normal),
            lattice_cells=cells,
        )

    def refine(self, time_factor: int = 1, tangential_factor: int = 1) -> TorusPlaneGrid:
        """Same geometry with K and N multiplied by the given factors."""
        return type(self)(
            **{
                **self.model_dump(),
                "time_modes": self.time_modes * time_factor,
                "tangential_modes": self.tangential_modes * tangential_factor,
            }
        )

    def with_extent(self, x_max: float, lattice_cells: int) -> TorusPlaneGrid:
        """Same time and tangential lattice over a uniform normal grid [0, x_max]."""
        normal = np.linspace(0.0, x_max, lattice_cells + 1)
        return type(self)(
            **{
                **self.model_dump(),
                "normal_grid": tuple(float(x) for x in normal),
                "lattice_cells": lattice_cells,
            }
        )

    # --- sizes ---

    @property
    def time_samples(self) -> int:
        return 2 * self.time_modes + 1

    @property
    def plane_dims(self) -> int:
        return self.n - 1

    @property
    def node_count(self) -> int:
        return len(self.normal_grid)

    @property
    def x_max(self) -> float:
        return self.normal_grid[-1]

    @property
    def lattice_dims(self) -> tuple[int, ...]:
        """Shape of the (time, tangential...) mode lattice."""
        return (self.time_samples,) + (self.tangential_modes,) * self.plane_dims

    def shape(self, components: int, nodes: int | None = None) -> tuple[int, ...]:
        count = self.node_count if nodes is None else nodes
        return (*self.lattice_dims, count, components)

    @property
    def transform_axes(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def node_axis(self) -> int:
        return self.n

    # --- coordinates ---

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.asarray(self.normal_grid, dtype=np.float64)

    @cached_property
    def lattice_indices(self) -> np.ndarray:
        lattice = np.linspace(0.0, self.x_max, self.lattice_cells + 1)
        return np.searchsorted(self.nodes, lattice).clip(0, self.node_count - 1)

    @cached_property
    def lattice_nodes(self) -> np.ndarray:
        return self.nodes[self.lattice_indices]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.time_samples) * (self.tau / self.time_samples)

    @property
    def tangential_points(self) -> np.ndarray:
        return np.arange(self.tangential_modes) * (self.length / self.tangential_modes)

    @property
    def frequency(self) -> float:
        """Fundamental time frequency 2 pi / tau."""
        return 2.0 * np.pi / self.tau

    @property
    def wavenumber(self) -> float:
        """Fundamental tangential wavenumber 2 pi / L."""
        return 2.0 * np.pi / self.length

    @cached_property
    def time_indices(self) -> np.ndarray:
        """Integer time mode indices in FFT order."""
        return np.rint(np.fft.fftfreq(self.time_samples, 1.0 / self.time_samples)).astype(int)

    @cached_property
    def tangential_indices(self) -> np.ndarray:
        """Integer tangential mode indices in FFT order; index N/2 maps to -N/2."""
        n = self.tangential_modes
        return np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)

    def mode_axes(self, trailing: int = 2) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
        """
        Broadcastable time frequencies k and tangential wavenumbers xi_j.

        The arrays span the mode lattice and carry ``trailing`` singleton axes so they
        broadcast against field arrays (nodes and components by default).
        """
        ndim = self.n + trailing
        shape = [1] * ndim
        shape[0] = self.time_samples
        k = (self.frequency * self.time_indices).reshape(shape)
        xis = []
        for axis in range(1, self.n):
            shape = [1] * ndim
            shape[axis] = self.tangential_modes
            xis.append((self.wavenumber * self.tangential_indices).reshape(shape))
        return k, tuple(xis)

    def xi_norm(self, trailing: int = 2) -> np.ndarray:
        _, xis = self.mode_axes(trailing)
        return np.sqrt(sum(xi**2 for xi in xis))

    def nyquist_mask(self, trailing: int = 2) -> np.ndarray:
        """True on modes that carry a tangential Nyquist index."""
        mask = np.zeros(self.lattice_dims, dtype=bool)
        if self.tangential_modes % 2 == 0:
            nyq = self.tangential_modes // 2
            for axis in range(1, self.n):
                index = [slice(None)] * self.n
                index[axis] = nyq
                mask[tuple(index)] = True
        return mask.reshape(self.lattice_dims + (1,) * trailing)

    def derivative_wavenumbers(self, trailing: int = 2) -> tuple[np.ndarray, ...]:
        """Tangential wavenumbers with the Nyquist index zeroed."""
        _, xis = self.mode_axes(trailing)
        out = []
        for xi in xis:
            xi = xi.copy()
            if self.tangential_modes % 2 == 0:
                xi[xi == -self.wavenumber * (self.tangential_modes // 2)] = 0.0
            out.append(xi)
        return tuple(out)

    def matches(self, other: TorusPlaneGrid) -> bool:
        return self is other or self.model_dump() == other.model_dump()

    def describe(self) -> str:
        return (
            f"n={self.n} tau={self.tau!r} K={self.time_modes} N={self.tangential_modes} "
            f"L={self.length!r} X_max={self.x_max!r} nodes={self.node_count} M={self.lattice_cells}"
        )


def _refinement_points(x_max: float, ratio: float, first: float, cell_limit: float) -> np.ndarray:
    points, cell, x = [], first, 0.0
    while cell < cell_limit and x + cell < x_max:
        x += cell
        points.append((x, cell))
        cell *= ratio
    return np.asarray(points, dtype=np.float64).reshape(-1, 2)


def _merge(x_max: float, cells: int, ratio: float, first: float) -> np.ndarray:
    lattice = np.linspace(0.0, x_max, cells + 1)
    spacing = x_max / cells
    refinement = _refinement_points(x_max, ratio, first, spacing)
    if refinement.size == 0:
        return lattice
    x, local = refinement[:, 0], refinement[:, 1]
    nearest = np.abs(x - np.rint(x / spacing) * spacing)
    keep = x[nearest >= 0.5 * local]
    return np.unique(np.concatenate([lattice, keep]))


def _graded_nodes(x_max: float, nodes: int, ratio: float, first: float) -> tuple[np.ndarray, int]:
    for cells in range(nodes - 1, 0, -1):
        merged = _merge(x_max, cells, ratio, first)
        if merged.size <= nodes:
            return merged, cells
    raise GridError(f"Cannot fit a graded grid into {nodes} nodes")
