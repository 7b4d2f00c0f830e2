from periodic_stokes.spectral_core.fields import (
    PhysicalField,
    SpectralField,
    check_same_grid,
    is_negligible,
    stack_components,
)
from periodic_stokes.spectral_core.grid import TorusPlaneGrid
from periodic_stokes.spectral_core.io import read_field, write_field
from periodic_stokes.spectral_core.norms import (
    BesovBreakdown,
    NormSpec,
    besov_decomposition,
    gradient_norm,
    lebesgue_values,
    mixed_norm,
)
from periodic_stokes.spectral_core.transforms import (
    divergence,
    forward_transform,
    gradient,
    inverse_transform,
    laplacian,
    project_oscillatory,
    project_steady,
    remove_nyquist,
    spectral_derivative,
    trace,
)

__all__ = [
    "BesovBreakdown",
    "NormSpec",
    "PhysicalField",
    "SpectralField",
    "TorusPlaneGrid",
    "besov_decomposition",
    "check_same_grid",
    "divergence",
    "forward_transform",
    "gradient",
    "gradient_norm",
    "inverse_transform",
    "is_negligible",
    "laplacian",
    "lebesgue_values",
    "mixed_norm",
    "project_oscillatory",
    "project_steady",
    "read_field",
    "remove_nyquist",
    "spectral_derivative",
    "stack_components",
    "trace",
    "write_field",
]
