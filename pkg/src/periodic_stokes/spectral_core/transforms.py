import logging
from typing import Literal, overload

import numpy as np
import scipy.fft

from periodic_stokes.config import fft_workers
from periodic_stokes.exceptions import GridError, NonHermitianError
from periodic_stokes.spectral_core.fields import PhysicalField, SpectralField
from periodic_stokes.spectral_core.grid import TorusPlaneGrid

logger = logging.getLogger(__name__)

type Direction = Literal["time", "normal"] | int

HERMITIAN_RTOL = 1e-9


def _lattice_size(grid: TorusPlaneGrid) -> int:
    return int(np.prod(grid.lattice_dims))


def hermitian_partner(values: np.ndarray, grid: TorusPlaneGrid) -> np.ndarray:
    """Coefficients at (-k, -xi) aligned with those at (k, xi)."""
    partner = values
    for axis in grid.transform_axes:
        partner = np.roll(np.flip(partner, axis=axis), 1, axis=axis)
    return partner


def hermitian_defect(values: np.ndarray, grid: TorusPlaneGrid) -> float:
    if values.size == 0:
        return 0.0
    return float(np.max(np.abs(values - np.conj(hermitian_partner(values, grid)))))


def forward_values(values: np.ndarray, grid: TorusPlaneGrid) -> np.ndarray:
    coefficients = scipy.fft.fftn(values, axes=grid.transform_axes, workers=fft_workers())
    return coefficients / _lattice_size(grid)


def inverse_values(values: np.ndarray, grid: TorusPlaneGrid, check: bool = True) -> np.ndarray:
    if check:
        scale = float(np.max(np.abs(values))) if values.size else 0.0
        defect = hermitian_defect(values, grid)
        if defect > HERMITIAN_RTOL * max(scale, np.finfo(float).tiny):
            raise NonHermitianError(
                f"Coefficients are not Hermitian (defect {defect:.3e} at scale {scale:.3e})"
            )
    samples = scipy.fft.ifftn(values, axes=grid.transform_axes, workers=fft_workers())
    return np.real(samples) * _lattice_size(grid)


def forward_transform(field: PhysicalField) -> SpectralField:
    """
    Discrete Fourier coefficients on the (k, xi) lattice.

    Normalized by the time average (1/tau) int dt and the box average in x', so the
    (k=0, xi=0) coefficient is the mean of the field.
    """
    if field.values.shape != field.expected_shape:
        raise GridError(f"Array shape {field.values.shape} does not match {field.expected_shape}")
    return SpectralField(
        grid=field.grid,
        values=forward_values(field.values, field.grid),
        components=field.components,
        on_boundary=field.on_boundary,
    )


def inverse_transform(spec: SpectralField) -> PhysicalField:
    """Real samples of a Hermitian coefficient field; raises on non-Hermitian input."""
    return PhysicalField(
        grid=spec.grid,
        values=inverse_values(spec.values, spec.grid),
        components=spec.components,
        on_boundary=spec.on_boundary,
    )


@overload
def project_steady(field: SpectralField) -> SpectralField: ...
@overload
def project_steady(field: PhysicalField) -> PhysicalField: ...
def project_steady(field: SpectralField | PhysicalField) -> SpectralField | PhysicalField:
    """Time average P: keeps the k = 0 coefficients only."""
    if isinstance(field, PhysicalField):
        mean = np.mean(field.values, axis=0, keepdims=True)
        return field.replace(values=np.broadcast_to(mean, field.values.shape))

    def steady(array: np.ndarray) -> np.ndarray:
        out = np.zeros_like(array)
        out[0] = array[0]
        return out

    return field.map(steady)


@overload
def project_oscillatory(field: SpectralField) -> SpectralField: ...
@overload
def project_oscillatory(field: PhysicalField) -> PhysicalField: ...
def project_oscillatory(field: SpectralField | PhysicalField) -> SpectralField | PhysicalField:
    """Complement P^perp = id - P: drops the k = 0 coefficients."""
    if isinstance(field, PhysicalField):
        mean = np.mean(field.values, axis=0, keepdims=True)
        return field.replace(values=field.values - mean)

    def oscillatory(array: np.ndarray) -> np.ndarray:
        out = array.copy()
        out[0] = 0.0
        return out

    return field.map(oscillatory)


def remove_nyquist(field: SpectralField) -> SpectralField:
    """Zero the tangential Nyquist modes, warning if they carried content."""
    mask = field.grid.nyquist_mask()
    if not mask.any():
        return field
    if np.any(np.abs(np.where(mask, field.values, 0.0)) > 0.0):
        logger.warning("Dropping nonzero tangential Nyquist content from the data")
    return field.map(lambda a: np.where(mask, 0.0, a))


def normal_difference(values: np.ndarray, grid: TorusPlaneGrid) -> np.ndarray:
    """Second-order finite-difference x_n-derivative on the (possibly graded) normal grid."""
    return np.gradient(values, grid.nodes, axis=grid.node_axis, edge_order=2)


def spectral_derivative(spec: SpectralField, which: Direction) -> SpectralField:
    """
    Derivative of a coefficient field.

    Args:
        spec (SpectralField): Field to differentiate.
        which: ``"time"`` multiplies by ik, an integer j multiplies by i xi_j (Nyquist
          index zeroed), ``"normal"`` uses the analytic normal-derivative twins when the
          field carries them and finite differences otherwise.
    """
    grid = spec.grid
    if which == "time":
        k, _ = grid.mode_axes()
        return spec.map(lambda a: 1j * k * a)
    if which == "normal":
        if spec.on_boundary:
            raise GridError("Boundary fields have no normal derivative")
        if spec.normal_derivatives:
            return spec.replace(
                values=spec.normal_derivatives[0],
                normal_derivatives=spec.normal_derivatives[1:],
            )
        return spec.replace(values=normal_difference(spec.values, grid), normal_derivatives=())
    if isinstance(which, int) and 0 <= which < grid.plane_dims:
        xi = grid.derivative_wavenumbers()[which]
        return spec.map(lambda a: 1j * xi * a)
    raise ValueError(f"Unsupported derivative direction: {which!r}")


def gradient(spec: SpectralField) -> list[SpectralField]:
    """Spatial derivatives [d_1, ..., d_{n-1}, d_n] (tangential only on the boundary)."""
    parts = [spectral_derivative(spec, j) for j in range(spec.grid.plane_dims)]
    if not spec.on_boundary:
        parts.append(spectral_derivative(spec, "normal"))
    return parts


def laplacian(spec: SpectralField) -> SpectralField:
    result = spec * 0.0
    for j in range(spec.grid.plane_dims):
        result = result + spectral_derivative(spectral_derivative(spec, j), j)
    if not spec.on_boundary:
        result = result + spectral_derivative(spectral_derivative(spec, "normal"), "normal")
    return result


def divergence(spec: SpectralField) -> SpectralField:
    """Divergence of an n-vector field, d_n taken from the last component."""
    grid = spec.grid
    if spec.components != grid.n:
        raise GridError(f"Divergence needs {grid.n} components, got {spec.components}")
    total = spectral_derivative(spec.component(grid.n - 1), "normal")
    for j in range(grid.plane_dims):
        total = total + spectral_derivative(spec.component(j), j)
    return total


def trace(spec: SpectralField) -> SpectralField:
    """Restriction to x_n = 0."""
    if spec.on_boundary:
        return spec
    return SpectralField(
        grid=spec.grid,
        values=spec.values[..., :1, :],
        components=spec.components,
        on_boundary=True,
    )
