"""
Discrete mixed-norm calculators on T x R^{n-1} x R_+.

Lebesgue norms use averaged measures in t and x' (matching the transform
normalization), trapezoidal quadrature in x_n, and the pointwise Euclidean magnitude
over components. Fields that live on x_n = 0 skip the normal integral.
"""

from __future__ import annotations

import logging
from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid

from periodic_stokes.exceptions import NormError
from periodic_stokes.spectral_core.fields import PhysicalField, SpectralField, is_negligible
from periodic_stokes.spectral_core.grid import TorusPlaneGrid
from periodic_stokes.spectral_core.transforms import (
    forward_transform,
    gradient,
    inverse_values,
    spectral_derivative,
)
from periodic_stokes.symbols.modes import ParabolicScale
from periodic_stokes.symbols.partition import shell_range, shell_weight

logger = logging.getLogger(__name__)

type Flavor = Literal["lebesgue", "sobolev", "besov", "homogeneous", "bessel", "parabolic_bessel"]

TOP_SHELL_FLAG = 0.01


class NormSpec(BaseModel):
    """Which norm to compute, with its orders and integrability."""

    model_config = ConfigDict(frozen=True)

    flavor: Flavor = Field("lebesgue", description="Norm family.")
    r: float = Field(0.0, description="Temporal order.")
    s: float = Field(0.0, description="Spatial (or parabolic, for besov) order.")
    q: float = Field(2.0, gt=1.0, description="Integrability exponent.")
    m: int = Field(1, ge=1, description="Parabolic order of the Besov scale.")

    @model_validator(mode="after")
    def _check_orders(self) -> Self:
        if not np.isfinite(self.q):
            raise ValueError(f"`q` must be finite, got {self.q!r}")
        if self.flavor == "sobolev":
            if self.r not in (0.0, 1.0) or self.s not in (0.0, 1.0, 2.0):
                raise ValueError(
                    "Sobolev norms take `r` in {0, 1} and `s` in {0, 1, 2}, "
                    f"got r={self.r}, s={self.s}"
                )
        return self

    def label(self) -> str:
        if self.flavor == "lebesgue":
            return f"L^{self.q:g}"
        return f"{self.flavor}(r={self.r:g},s={self.s:g},q={self.q:g})"


class BesovBreakdown(BaseModel):
    """Per-shell contributions of an anisotropic Besov norm."""

    model_config = ConfigDict(frozen=True)

    s: float
    q: float
    shells: tuple[int, ...]
    shell_norms: tuple[float, ...]
    weighted: tuple[float, ...]
    total: float
    top_fraction: float
    flagged: bool


def lebesgue_values(
    values: np.ndarray, grid: TorusPlaneGrid, q: float, on_boundary: bool = False
) -> float:
    """Discrete L^q norm of sample values (real or complex) shaped like ``grid``."""
    magnitude = np.sqrt(np.sum(np.abs(values) ** 2, axis=-1))
    averaged = np.mean(magnitude**q, axis=grid.transform_axes)
    if on_boundary:
        integral = float(averaged[0])
    else:
        integral = float(trapezoid(averaged, grid.nodes))
    return integral ** (1.0 / q)


def _spectral(field: PhysicalField | SpectralField) -> SpectralField:
    return forward_transform(field) if isinstance(field, PhysicalField) else field


def _lebesgue(spec: SpectralField, q: float) -> float:
    return lebesgue_values(inverse_values(spec.values, spec.grid), spec.grid, q, spec.on_boundary)


def _require_oscillatory(spec: SpectralField, what: str) -> None:
    if not is_negligible(spec.values[0], spec.values):
        raise NormError(f"{what} is defined for purely oscillatory fields; k = 0 part is nonzero")


def _sobolev(spec: SpectralField, spec_norm: NormSpec) -> float:
    q = spec_norm.q
    terms = [spec]
    if spec_norm.r >= 1:
        terms.append(spectral_derivative(spec, "time"))
    if spec_norm.s >= 1:
        first = gradient(spec)
        terms.extend(first)
        if spec_norm.s >= 2:
            for i, part in enumerate(first):
                second = gradient(part)
                terms.extend(second[i:])
    return float(sum(_lebesgue(term, q) ** q for term in terms) ** (1.0 / q))


def _weighted(spec: SpectralField, weight: np.ndarray, q: float) -> float:
    values = spec.values * weight
    return lebesgue_values(inverse_values(values, spec.grid), spec.grid, q, spec.on_boundary)


def _homogeneous_weight(spec: SpectralField, r: float, s: float) -> np.ndarray:
    grid = spec.grid
    k, _ = grid.mode_axes()
    xi_norm = grid.xi_norm()
    at_origin = xi_norm == 0.0
    if s < 0:
        origin_part = np.where(np.broadcast_to(at_origin, spec.values.shape), spec.values, 0.0)
        if not is_negligible(origin_part, spec.values):
            raise NormError(
                f"Homogeneous norm of negative order s={s:g} needs zero xi = 0 coefficients"
            )
    safe = np.where(at_origin, 1.0, xi_norm)
    spatial = np.where(at_origin, 1.0 if s == 0 else 0.0, safe**s)
    return (1.0 + k**2) ** (r / 2.0) * spatial


def _parabolic_length(spec: SpectralField, m: int) -> np.ndarray:
    k, _ = spec.grid.mode_axes()
    return ParabolicScale(m=m)(k, spec.grid.xi_norm())


def besov_decomposition(
    field: PhysicalField | SpectralField, spec_norm: NormSpec
) -> BesovBreakdown:
    """
    Anisotropic Besov norm B^s_{q,q} split into its dyadic shells.

    The shells l = 0..l_max are taken from the parabolic partition of unity with
    2^{l_max} above the largest parabolic length on the lattice.
    """
    spec = _spectral(field)
    _require_oscillatory(spec, "The Besov norm")
    q, s = spec_norm.q, spec_norm.s
    rho = _parabolic_length(spec, spec_norm.m)
    present = np.any(np.abs(spec.values) > 0.0, axis=(-2, -1), keepdims=True)
    low = np.where(present & (rho < 1.0) & (rho > 0.0), True, False)
    if np.any(low):
        logger.warning("Besov sum from l = 0 does not fully cover modes with <k, xi> < 1")
    first, last = shell_range(np.where(present, rho, 0.0))
    shells = tuple(range(first, last + 1))
    norms = tuple(_weighted(spec, shell_weight(rho, l), q) for l in shells)
    weighted = tuple(2.0 ** (s * l) * value for l, value in zip(shells, norms, strict=True))
    total = float(sum(w**q for w in weighted) ** (1.0 / q))
    top = weighted[-1] / total if total > 0.0 else 0.0
    if top > TOP_SHELL_FLAG:
        logger.warning(f"Top Besov shell l={shells[-1]} carries {top:.2%} of the norm")
    return BesovBreakdown(
        s=s,
        q=q,
        shells=shells,
        shell_norms=norms,
        weighted=weighted,
        total=total,
        top_fraction=float(top),
        flagged=bool(top > TOP_SHELL_FLAG),
    )


def mixed_norm(field: PhysicalField | SpectralField, spec_norm: NormSpec) -> float:
    """
    Discrete norm of ``field`` in the family named by ``spec_norm.flavor``.

    - ``lebesgue``: L^q(T; L^q).
    - ``sobolev``: l^q-sum of the L^q norms of u, d_t u (r = 1) and spatial
      derivatives up to order s.
    - ``besov``: anisotropic B^s_{q,q}, purely oscillatory fields only.
    - ``homogeneous``: weights (1 + k^2)^{r/2} |xi|^s; negative s needs zero xi = 0 content.
    - ``bessel``: weights (1 + k^2)^{r/2} (1 + |xi|^2)^{s/2}.
    - ``parabolic_bessel``: weights <k, xi>^s, purely oscillatory fields only.
    """
    spec = _spectral(field)
    q = spec_norm.q
    match spec_norm.flavor:
        case "lebesgue":
            return _lebesgue(spec, q)
        case "sobolev":
            return _sobolev(spec, spec_norm)
        case "besov":
            return besov_decomposition(spec, spec_norm).total
        case "homogeneous":
            return _weighted(spec, _homogeneous_weight(spec, spec_norm.r, spec_norm.s), q)
        case "bessel":
            k, _ = spec.grid.mode_axes()
            weight = (1.0 + k**2) ** (spec_norm.r / 2.0) * (1.0 + spec.grid.xi_norm() ** 2) ** (
                spec_norm.s / 2.0
            )
            return _weighted(spec, weight, q)
        case "parabolic_bessel":
            _require_oscillatory(spec, "The parabolic Bessel-potential norm")
            return _weighted(spec, _parabolic_length(spec, spec_norm.m) ** spec_norm.s, q)
    raise NormError(f"Unsupported norm flavor: {spec_norm.flavor}")


def gradient_norm(field: PhysicalField | SpectralField, q: float, order: int = 1) -> float:
    """L^q norm of the full spatial gradient (order 1) or Hessian (order 2)."""
    if order not in (1, 2):
        raise ValueError(f"`order` must be 1 or 2, got {order}")
    spec = _spectral(field)
    parts = gradient(spec)
    if order == 2:
        parts = [second for first in parts for second in gradient(first)]
    values = np.concatenate([inverse_values(p.values, spec.grid) for p in parts], axis=-1)
    return lebesgue_values(values, spec.grid, q, spec.on_boundary)
