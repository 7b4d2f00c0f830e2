"""
Empirical maximal-regularity ratios.

For every data bundle of an ensemble the solution norm (LHS) is divided by the data
norm (RHS) of the a priori estimate. Oscillatory bundles use

    LHS = ||u||_{W^{1,2,q}} + ||grad p||_q
    RHS = ||f||_q + ||g||_{W^{1,q}(T; W^{-1,q}) and L^q(T; W^{1,q})}
          + ||h||_{B^{2-1/q}} + ||h_n||_{W^{1,q}(T; W^{-1/q,q})}

and steady bundles

    LHS = ||grad^2 v||_q + ||grad Pi||_q
    RHS = ||f||_q + ||g||_{W^{1,q}} + ||h||_{H^{2-1/q,q}}

Ensembles are lists of ``BundleRecipe`` so the same ensemble can be sampled again on a
refined grid.
"""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from periodic_stokes.exceptions import EstimateError
from periodic_stokes.solvers import (
    BoundaryData,
    DataBundle,
    SolverOptions,
    StokesSolution,
    solve_bundle,
)
from periodic_stokes.spectral_core import (
    NormSpec,
    PhysicalField,
    TorusPlaneGrid,
    besov_decomposition,
    forward_transform,
    gradient_norm,
    mixed_norm,
)

logger = logging.getLogger(__name__)

type EstimateKind = Literal["oscillatory", "steady"]
type Target = Literal["f", "g", "h"]

DEFAULT_ENSEMBLE_SIZE = 50
MAX_INDEX = 4
MAX_TERMS = 3


class DataTerm(BaseModel):
    """
    One real plane-wave term Re(a e^{i(k t + xi.x')}) times a decaying x_n-profile.

    Forcing terms use the odd profile (x_n / w) e^{-x_n^2 / (2 w^2)}, divergence terms
    the even profile e^{-x_n^2 / (2 w^2)}; boundary terms have no profile.
    """

    model_config = ConfigDict(frozen=True)

    target: Target
    component: int = Field(0, ge=0)
    time_index: int = Field(..., ge=0)
    tangential_index: tuple[int, ...]
    amplitude: tuple[float, float] = Field(..., description="Real and imaginary part of a.")
    width: float = Field(1.0, gt=0.0)

    def _phase(self, grid: TorusPlaneGrid, t: np.ndarray, xs: list[np.ndarray]) -> np.ndarray:
        angle = grid.frequency * self.time_index * t
        for index, x in zip(self.tangential_index, xs, strict=True):
            angle = angle + grid.wavenumber * index * x
        a = complex(*self.amplitude)
        return np.real(a * np.exp(1j * angle))

    def _profile(self, x: np.ndarray) -> np.ndarray:
        y = x / self.width
        if self.target == "f":
            return y * np.exp(-0.5 * y**2)
        if self.target == "g":
            return np.exp(-0.5 * y**2)
        return np.ones_like(x)

    def sample(self, grid: TorusPlaneGrid, components: int, on_boundary: bool) -> PhysicalField:
        def function(t: np.ndarray, *xs: np.ndarray) -> list[np.ndarray]:
            value = self._phase(grid, t, list(xs[:-1])) * self._profile(xs[-1])
            zero = np.zeros_like(value)
            return [value if c == self.component else zero for c in range(components)]

        return PhysicalField.from_function(grid, function, components, on_boundary)


class BundleRecipe(BaseModel):
    """A recorded random bundle: its seed, trial index and terms."""

    model_config = ConfigDict(frozen=True)

    seed: int
    trial: int
    kind: EstimateKind
    n: int = Field(..., ge=2)
    terms: tuple[DataTerm, ...]

    def sample(self, grid: TorusPlaneGrid) -> DataBundle:
        """The bundle's data on ``grid``; the grid must resolve every term."""
        if grid.n != self.n:
            raise ValueError(f"Recipe for n={self.n} sampled on a grid with n={grid.n}")
        limit = min(grid.time_modes, grid.tangential_modes // 2 - 1)
        f = PhysicalField.zeros(grid, grid.n)
        g = PhysicalField.zeros(grid, 1)
        h = PhysicalField.zeros(grid, grid.n, on_boundary=True)
        for term in self.terms:
            if max(term.time_index, *(abs(i) for i in term.tangential_index)) > limit:
                raise ValueError(f"Term {term} is not resolved on {grid.describe()}")
            if term.target == "f":
                f = f + term.sample(grid, grid.n, on_boundary=False)
            elif term.target == "g":
                g = g + term.sample(grid, 1, on_boundary=False)
            else:
                h = h + term.sample(grid, grid.n, on_boundary=True)
        return DataBundle(f=f, g=g, h=BoundaryData(field=h))


def random_ensemble(
    n: int = 2,
    size: int = DEFAULT_ENSEMBLE_SIZE,
    seed: int = 0,
    kind: EstimateKind = "oscillatory",
    max_index: int = MAX_INDEX,
) -> list[BundleRecipe]:
    """
    Seeded single- and few-mode bundles.

    Every term has a nonzero first tangential index, so the normal boundary data and
    the divergence data have no tangential mean and every bundle is compatible.
    Oscillatory bundles use time indices 1..max_index, steady bundles index 0.
    """
    rng = np.random.default_rng(seed)
    targets: tuple[Target, ...] = ("f", "g", "h")
    recipes = []
    for trial in range(size):
        terms = []
        for _ in range(int(rng.integers(1, MAX_TERMS + 1))):
            target = targets[int(rng.integers(len(targets)))]
            first = int(rng.integers(1, max_index + 1)) * int(rng.choice([-1, 1]))
            rest = tuple(int(i) for i in rng.integers(-max_index, max_index + 1, size=n - 2))
            terms.append(
                DataTerm(
                    target=target,
                    component=0 if target == "g" else int(rng.integers(n)),
                    time_index=0 if kind == "steady" else int(rng.integers(1, max_index + 1)),
                    tangential_index=(first, *rest),
                    amplitude=(float(rng.normal()), float(rng.normal())),
                    width=float(rng.uniform(0.5, 2.0)),
                )
            )
        recipes.append(
            BundleRecipe(seed=seed, trial=trial, kind=kind, n=n, terms=tuple(terms))
        )
    return recipes


def scale_bundle(bundle: DataBundle, factor: float) -> DataBundle:
    return bundle.scaled(factor)


class EstimateRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    trial: int
    lhs: float
    rhs: float
    ratio: float | None
    degenerate: bool
    besov_flagged: bool = False


class EstimateRatioReport(BaseModel):
    """Per-trial ratios LHS / RHS with ensemble statistics."""

    model_config = ConfigDict(frozen=True)

    kind: EstimateKind
    q: float
    grid: str
    seed: int | None = None
    norms: tuple[str, ...]
    rows: tuple[EstimateRow, ...]

    @property
    def ratios(self) -> list[float]:
        return [row.ratio for row in self.rows if row.ratio is not None]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=0.0)

    @property
    def median_ratio(self) -> float:
        return float(np.median(self.ratios)) if self.ratios else 0.0

    @property
    def degenerate(self) -> list[int]:
        return [row.trial for row in self.rows if row.degenerate]

    def csv_rows(self) -> list[tuple[int, float, float, str, bool, bool]]:
        return [
            (
                row.trial,
                row.lhs,
                row.rhs,
                "" if row.ratio is None else repr(row.ratio),
                row.degenerate,
                row.besov_flagged,
            )
            for row in self.rows
        ]


def _norm_specs(q: float, kind: EstimateKind) -> dict[str, NormSpec]:
    trace_order = 2.0 - 1.0 / q
    if kind == "steady":
        return {
            "f": NormSpec(flavor="lebesgue", q=q),
            "g": NormSpec(flavor="sobolev", r=0.0, s=1.0, q=q),
            "h": NormSpec(flavor="bessel", r=0.0, s=trace_order, q=q),
        }
    return {
        "u": NormSpec(flavor="sobolev", r=1.0, s=2.0, q=q),
        "f": NormSpec(flavor="lebesgue", q=q),
        "g": NormSpec(flavor="sobolev", r=0.0, s=1.0, q=q),
        "g_dual": NormSpec(flavor="homogeneous", r=1.0, s=-1.0, q=q),
        "h": NormSpec(flavor="besov", s=trace_order, q=q),
        "h_n": NormSpec(flavor="homogeneous", r=1.0, s=-1.0 / q, q=q),
    }


def norm_labels(q: float, kind: EstimateKind) -> tuple[str, ...]:
    labels = [f"{name}:{spec.label()}" for name, spec in _norm_specs(q, kind).items()]
    if kind == "steady":
        return ("u:hessian", "p:gradient", *labels)
    return (*labels, "p:gradient")


def solution_norm(solution: StokesSolution, q: float, kind: EstimateKind) -> float:
    """LHS of the estimate."""
    pressure = gradient_norm(solution.pressure_spectral, q)
    if kind == "steady":
        return gradient_norm(solution.velocity_spectral, q, order=2) + pressure
    spec = _norm_specs(q, kind)["u"]
    return mixed_norm(solution.velocity_spectral, spec) + pressure


def data_norm(bundle: DataBundle, q: float, kind: EstimateKind) -> tuple[float, bool]:
    """RHS of the estimate, and whether the Besov top shell was flagged."""
    specs = _norm_specs(q, kind)
    g = forward_transform(bundle.g)
    h = bundle.h.spectral
    total = mixed_norm(forward_transform(bundle.f), specs["f"]) + mixed_norm(g, specs["g"])
    if kind == "steady":
        return total + mixed_norm(h, specs["h"]), False
    besov = besov_decomposition(h, specs["h"])
    total += mixed_norm(g, specs["g_dual"]) + besov.total
    total += mixed_norm(h.component(bundle.grid.n - 1), specs["h_n"])
    return total, besov.flagged


def estimate_row(
    trial: int,
    bundle: DataBundle,
    q: float,
    kind: EstimateKind = "oscillatory",
    options: SolverOptions | None = None,
) -> EstimateRow:
    """
    Ratio of one bundle.

    Raises:
        EstimateError: The data norm vanishes while the solution norm does not.
    """
    rhs, flagged = data_norm(bundle, q, kind)
    lhs = solution_norm(solve_bundle(bundle, options), q, kind)
    if rhs == 0.0:
        if lhs != 0.0:
            raise EstimateError(f"Trial {trial}: zero data norm with solution norm {lhs:.3e}")
        logger.info(f"Trial {trial}: zero data, ratio skipped")
        return EstimateRow(trial=trial, lhs=lhs, rhs=rhs, ratio=None, degenerate=True)
    ratio = lhs / rhs
    if not np.isfinite(ratio):
        raise EstimateError(f"Trial {trial}: non-finite ratio {lhs!r} / {rhs!r}")
    return EstimateRow(
        trial=trial, lhs=lhs, rhs=rhs, ratio=ratio, degenerate=False, besov_flagged=flagged
    )


def estimate_constant_sweep(
    ensemble: list[DataBundle],
    q: float = 2.0,
    kind: EstimateKind = "oscillatory",
    options: SolverOptions | None = None,
    seed: int | None = None,
) -> EstimateRatioReport:
    """
    Ratios LHS / RHS over an ensemble of compatible data bundles.

    Args:
        ensemble (list[DataBundle]): Bundles on one grid, purely oscillatory for
          ``kind="oscillatory"`` and time independent for ``kind="steady"``.
        q (float): Integrability exponent of every norm.
        kind (str): Which estimate to sample.
        options (SolverOptions, optional): Solver knobs.
        seed (int, optional): Seed the ensemble was drawn with, recorded in the report.
    """
    if not ensemble:
        raise ValueError("`ensemble` must contain at least one bundle")
    rows = tuple(estimate_row(i, bundle, q, kind, options) for i, bundle in enumerate(ensemble))
    report = EstimateRatioReport(
        kind=kind,
        q=q,
        grid=ensemble[0].grid.describe(),
        seed=seed,
        norms=norm_labels(q, kind),
        rows=rows,
    )
    logger.info(
        f"Estimate sweep ({kind}, q={q:g}): {len(rows)} trials, max={report.max_ratio:.4f} "
        f"median={report.median_ratio:.4f}"
    )
    return report


class ResolutionComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    coarse: EstimateRatioReport
    fine: EstimateRatioReport

    @property
    def max_change(self) -> float:
        """Relative change of the ensemble maximum under refinement."""
        if self.fine.max_ratio == 0.0:
            return 0.0 if self.coarse.max_ratio == 0.0 else float("inf")
        return abs(self.coarse.max_ratio - self.fine.max_ratio) / self.fine.max_ratio


def resolution_sweep(
    recipes: list[BundleRecipe],
    grid: TorusPlaneGrid,
    q: float = 2.0,
    options: SolverOptions | None = None,
) -> ResolutionComparison:
    """The sweep of ``recipes`` on ``grid`` and on the grid with K and N doubled."""
    if not recipes:
        raise ValueError("`recipes` must contain at least one recipe")
    kind, seed = recipes[0].kind, recipes[0].seed
    fine_grid = grid.refine(2, 2)
    reports = [
        estimate_constant_sweep(
            [recipe.sample(g) for recipe in recipes], q, kind, options, seed=seed
        )
        for g in (grid, fine_grid)
    ]
    return ResolutionComparison(coarse=reports[0], fine=reports[1])
