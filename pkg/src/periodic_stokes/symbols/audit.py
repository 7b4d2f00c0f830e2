"""
Numerical audit of the Marcinkiewicz multiplier condition.

For every epsilon in {0,1}^d the auditor samples |x^epsilon d^epsilon m(x)| on a signed
dyadic lattice using mixed central differences with a relative step, and reports the
suprema. A symbol whose zeroth-order supremum keeps growing toward the lattice edges
is reported as divergent.
"""

import itertools
import logging
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from periodic_stokes.exceptions import SymbolAuditError

logger = logging.getLogger(__name__)

type Symbol = Callable[..., np.ndarray]

TRIM_OCTAVES = 2
DIVERGENCE_FACTOR = 2.0
CHUNK = 8


class AuditReport(BaseModel):
    """Suprema of the weighted mixed derivatives of one symbol."""

    model_config = ConfigDict(frozen=True)

    name: str
    dimension: int = Field(..., ge=1)
    levels: int
    points_per_octave: int
    per_mask: dict[str, float] = Field(..., description="Supremum for each epsilon mask.")
    inner_per_mask: dict[str, float] = Field(
        ..., description="Supremum over the lattice with the outer octaves trimmed."
    )
    sup: float
    divergent: bool

    def rows(self) -> list[tuple[str, str, float, int]]:
        """CSV rows (symbol, epsilon mask, sup, points per octave)."""
        return [
            (self.name, mask, value, self.points_per_octave)
            for mask, value in self.per_mask.items()
        ]


def signed_dyadic_axis(levels: int, points_per_octave: int) -> tuple[np.ndarray, np.ndarray]:
    """Values +-2^{j/p} for |j| <= p*levels, and the flag of the trimmed inner range."""
    p = points_per_octave
    j = np.arange(-p * levels, p * levels + 1)
    positive = np.exp2(j / p)
    inner = np.abs(j) <= p * max(levels - TRIM_OCTAVES, 0)
    values = np.concatenate([-positive[::-1], positive])
    flags = np.concatenate([inner[::-1], inner])
    return values, flags


def _is_divergent(full: dict[str, float], inner: dict[str, float], dimension: int) -> bool:
    zeroth = _mask_label((0,) * dimension)
    return full[zeroth] > DIVERGENCE_FACTOR * inner[zeroth]


def _mask_label(mask: Sequence[int]) -> str:
    return "".join(str(bit) for bit in mask)


def _weighted_difference(
    symbol: Symbol, coords: list[np.ndarray], mask: Sequence[int], step: float
) -> np.ndarray:
    active = [i for i, bit in enumerate(mask) if bit]
    if not active:
        return np.asarray(symbol(*coords))
    total: np.ndarray | float = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=len(active)):
        shifted = list(coords)
        for axis, sign in zip(active, signs, strict=True):
            shifted[axis] = coords[axis] * (1.0 + sign * step)
        total = total + float(np.prod(signs)) * np.asarray(symbol(*shifted))
    return np.asarray(total) / (2.0 * step) ** len(active)


def marcinkiewicz_audit(
    symbol: Symbol,
    dimension: int,
    *,
    name: str = "symbol",
    levels: int = 10,
    points_per_octave: int = 2,
    step: float = 1e-4,
    warn: bool = True,
) -> AuditReport:
    """
    Audit ``symbol(x_1, ..., x_d)`` on the signed dyadic lattice 2^{-levels}..2^{levels}.

    Args:
        symbol: Vectorized callable of ``dimension`` array arguments; vector-valued
          symbols return their components on extra trailing axes.
        dimension (int): Number of frequency variables d.
        name (str): Label used in the report.
        levels (int): Octaves on each side of 1 per axis.
        points_per_octave (int): Lattice density.
        step (float): Relative finite-difference step.

    Returns:
        AuditReport: per-epsilon suprema over the full and the trimmed lattice.
    """
    if dimension < 1:
        raise ValueError(f"`dimension` must be positive, got {dimension}")
    axis, flags = signed_dyadic_axis(levels, points_per_octave)
    masks = list(itertools.product((0, 1), repeat=dimension))
    full = {_mask_label(m): 0.0 for m in masks}
    inner = {_mask_label(m): 0.0 for m in masks}

    for start in range(0, axis.size, CHUNK):
        block = slice(start, start + CHUNK)
        coords = np.meshgrid(axis[block], *([axis] * (dimension - 1)), indexing="ij")
        inner_flags = np.meshgrid(flags[block], *([flags] * (dimension - 1)), indexing="ij")
        inside = np.logical_and.reduce(inner_flags)
        for mask in masks:
            label = _mask_label(mask)
            magnitude = np.abs(_weighted_difference(symbol, coords, mask, step))
            if magnitude.ndim > dimension:
                magnitude = magnitude.max(axis=tuple(range(dimension, magnitude.ndim)))
            if not np.all(np.isfinite(magnitude)):
                raise SymbolAuditError(f"{name}: non-finite value for epsilon mask {label}")
            full[label] = max(full[label], float(magnitude.max()))
            if inside.any():
                inner[label] = max(inner[label], float(magnitude[inside].max()))

    zeroth = _mask_label((0,) * dimension)
    divergent = _is_divergent(full, inner, dimension)
    if divergent and warn:
        logger.warning(
            f"{name}: supremum grows toward the lattice edge "
            f"({full[zeroth]:.3e} vs {inner[zeroth]:.3e} inside)"
        )
    report = AuditReport(
        name=name,
        dimension=dimension,
        levels=levels,
        points_per_octave=points_per_octave,
        per_mask=full,
        inner_per_mask=inner,
        sup=max(full.values()),
        divergent=divergent,
    )
    logger.info(f"Audited {name}: sup={report.sup:.6e} divergent={divergent}")
    return report


def audit_profile_symbol(
    profile: Callable[..., np.ndarray],
    dimension: int,
    x_samples: Sequence[float],
    *,
    name: str = "profile",
    levels: int = 10,
    points_per_octave: int = 2,
    step: float = 1e-4,
) -> AuditReport:
    """
    Audit ``profile(x_1, ..., x_d, x_n)`` uniformly over the sampled normal positions.

    The merged report keeps the per-epsilon maxima over all samples.
    """
    reports = [
        marcinkiewicz_audit(
            lambda *xs, x=x: profile(*xs, x),
            dimension,
            name=f"{name}@{x:g}",
            levels=levels,
            points_per_octave=points_per_octave,
            step=step,
            warn=False,
        )
        for x in x_samples
    ]
    labels = reports[0].per_mask.keys()
    full = {label: max(r.per_mask[label] for r in reports) for label in labels}
    inner = {label: max(r.inner_per_mask[label] for r in reports) for label in labels}
    return AuditReport(
        name=name,
        dimension=dimension,
        levels=levels,
        points_per_octave=points_per_octave,
        per_mask=full,
        inner_per_mask=inner,
        sup=max(full.values()),
        divergent=_is_divergent(full, inner, dimension),
    )


def refinement_change(coarse: AuditReport, fine: AuditReport) -> float:
    """Relative change of the overall supremum between two lattice densities."""
    if fine.sup == 0.0:
        return 0.0 if coarse.sup == 0.0 else float("inf")
    return abs(coarse.sup - fine.sup) / fine.sup


def default_profile_samples() -> list[float]:
    return [2.0**j for j in range(-6, 7)]
