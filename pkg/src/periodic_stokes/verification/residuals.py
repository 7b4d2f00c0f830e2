"""
Residuals of a candidate solution against the data of the time-periodic problem.

Time and tangential derivatives are spectral; normal derivatives come from the
analytic twins when the candidate carries them and from finite differences otherwise.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from periodic_stokes.exceptions import GridError
from periodic_stokes.solvers import DataBundle, StageFields, StokesSolution
from periodic_stokes.spectral_core import (
    SpectralField,
    forward_transform,
    lebesgue_values,
)
from periodic_stokes.spectral_core.transforms import inverse_values
from periodic_stokes.verification.manufactured import stokes_operator

logger = logging.getLogger(__name__)


class OperatorNorms(BaseModel):
    """L^q norms of the momentum, divergence and trace parts of one quantity."""

    model_config = ConfigDict(frozen=True)

    momentum: float = Field(..., ge=0.0)
    divergence: float = Field(..., ge=0.0)
    trace: float = Field(..., ge=0.0)

    @property
    def worst(self) -> float:
        return max(self.momentum, self.divergence, self.trace)


class ResidualReport(BaseModel):
    """
    Residuals d_t u - Laplace u + grad p - f, div u - g and trace u - h.

    ``stages`` holds the operator norms of each stage's own contribution, so a large
    residual can be traced to the stage that produced it.
    """

    model_config = ConfigDict(frozen=True)

    q: float
    momentum: float = Field(..., ge=0.0)
    divergence: float = Field(..., ge=0.0)
    trace: float = Field(..., ge=0.0)
    periodicity_defect: float = 0.0
    stages: dict[str, OperatorNorms] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_finite(self) -> ResidualReport:
        values = [self.momentum, self.divergence, self.trace, self.periodicity_defect]
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"Residuals must be finite, got {values}")
        if self.periodicity_defect != 0.0:
            raise ValueError("Fields on the time torus have no periodicity defect")
        return self

    @property
    def worst(self) -> float:
        return max(self.momentum, self.divergence, self.trace)

    def within(self, tolerance: float) -> bool:
        return self.worst <= tolerance

    def rows(self) -> list[tuple[str, float, float, float]]:
        """CSV rows (part, momentum, divergence, trace); the first row is the total."""
        rows = [("total", self.momentum, self.divergence, self.trace)]
        for name, part in self.stages.items():
            rows.append((name, part.momentum, part.divergence, part.trace))
        return rows


def _norm(spec: SpectralField, q: float) -> float:
    values = inverse_values(spec.values, spec.grid)
    return lebesgue_values(values, spec.grid, q, spec.on_boundary)


def _operator_norms(stage: StageFields, q: float) -> OperatorNorms:
    momentum, div, trace = stokes_operator(stage.velocity, stage.pressure)
    return OperatorNorms(
        momentum=_norm(momentum, q), divergence=_norm(div, q), trace=_norm(trace, q)
    )


def residual_check(candidate: StokesSolution, data: DataBundle, q: float = 2.0) -> ResidualReport:
    """
    Residuals of ``candidate`` for the data (f, g, h) in discrete L^q norms.

    Raises:
        GridError: The candidate and the data live on different grids.
    """
    grid = candidate.grid
    if not grid.matches(data.grid):
        raise GridError(
            f"Candidate lives on {grid.describe()} but the data on {data.grid.describe()}"
        )
    momentum, div, trace = stokes_operator(candidate.velocity_spectral, candidate.pressure_spectral)
    report = ResidualReport(
        q=q,
        momentum=_norm(momentum - forward_transform(data.f), q),
        divergence=_norm(div - forward_transform(data.g), q),
        trace=_norm(trace - data.h.spectral, q),
        stages={name: _operator_norms(stage, q) for name, stage in candidate.stages.items()},
    )
    logger.debug(
        f"Residuals momentum={report.momentum:.3e} divergence={report.divergence:.3e} "
        f"trace={report.trace:.3e}"
    )
    return report
