from __future__ import annotations

from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


def principal_root(k: np.ndarray | float, xi_norm: np.ndarray | float) -> np.ndarray:
    """sqrt(|xi|^2 + ik) on the branch with nonnegative real part."""
    xi2 = np.asarray(xi_norm, dtype=np.float64) ** 2
    return np.sqrt(xi2 + 1j * np.asarray(k, dtype=np.float64))


class ModePoint(BaseModel):
    """A single frequency pair (k, xi) of the dual lattice."""

    model_config = ConfigDict(frozen=True)

    k: float = Field(..., description="Time frequency, an element of (2 pi / tau) Z.")
    xi: tuple[float, ...] = Field(..., description="Tangential wavenumber vector.")

    @field_validator("xi", mode="before")
    @classmethod
    def _as_tuple(cls, value: object) -> tuple[float, ...]:
        return tuple(float(v) for v in np.atleast_1d(np.asarray(value, dtype=np.float64)))

    @property
    def xi_vector(self) -> np.ndarray:
        return np.asarray(self.xi, dtype=np.float64)

    @cached_property
    def xi_norm(self) -> float:
        return float(np.linalg.norm(self.xi_vector))

    @cached_property
    def root(self) -> complex:
        """The principal root lambda = sqrt(|xi|^2 + ik)."""
        return complex(principal_root(self.k, self.xi_norm))

    @property
    def is_steady(self) -> bool:
        return self.k == 0.0


class ParabolicScale(BaseModel):
    """The parabolic length <eta, xi> = (|eta|^2 + |xi|^{4m})^{1/(4m)}."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(1, ge=1, description="Parabolic order; time counts as 2m spatial derivatives.")

    def __call__(self, eta: np.ndarray | float, xi_norm: np.ndarray | float) -> np.ndarray:
        eta = np.abs(np.asarray(eta, dtype=np.float64))
        xi_norm = np.abs(np.asarray(xi_norm, dtype=np.float64))
        return (eta**2 + xi_norm ** (4 * self.m)) ** (1.0 / (4 * self.m))


class BumpSpec(BaseModel):
    """
    Smooth even bump supported on 1/2 <= |y| <= 2.

    h(y) = exp(-1 / ((|y| - 1/2)(2 - |y|))) inside the annulus, exactly 0 outside.
    """

    model_config = ConfigDict(frozen=True)

    inner: float = Field(0.5, gt=0)
    outer: float = Field(2.0, gt=0)

    def __call__(self, y: np.ndarray | float) -> np.ndarray:
        a = np.abs(np.asarray(y, dtype=np.float64))
        inside = (a > self.inner) & (a < self.outer)
        gap = np.where(inside, (a - self.inner) * (self.outer - a), 1.0)
        return np.where(inside, np.exp(-1.0 / gap), 0.0)
