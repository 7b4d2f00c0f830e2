"""
Property suites run by ``periodic-stokes verify``.

Each suite records its metrics and the names of the failed checks in a ``SuiteResult``.
A failed property never raises; only invalid input does.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from periodic_stokes.exceptions import StokesError, SymbolAuditError
from periodic_stokes.solvers import (
    BoundaryData,
    DataBundle,
    SolverOptions,
    mode_profiles,
    pressure_gradient_split,
    solve_boundary_oscillatory,
    solve_bundle,
)
from periodic_stokes.spectral_core import (
    NormSpec,
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    besov_decomposition,
    forward_transform,
    gradient,
    inverse_transform,
    laplacian,
    mixed_norm,
    project_oscillatory,
    project_steady,
    remove_nyquist,
    spectral_derivative,
    stack_components,
)
from periodic_stokes.symbols import (
    AuditReport,
    BumpSpec,
    ModePoint,
    ParabolicScale,
    audit_profile_symbol,
    default_profile_samples,
    marcinkiewicz_audit,
    partition_phi,
    refinement_change,
    symbol_heat_profile,
    symbol_M,
    symbol_M1,
    symbol_M2,
)
from periodic_stokes.symbols.multipliers import ProfileKind
from periodic_stokes.verification.estimates import (
    EstimateKind,
    estimate_row,
    random_ensemble,
    resolution_sweep,
    scale_bundle,
)
from periodic_stokes.verification.manufactured import (
    CATALOGUE,
    manufactured_solution,
    recovery_errors,
    stokes_operator,
)
from periodic_stokes.verification.oracle import oracle_reference, self_convergence_order
from periodic_stokes.verification.residuals import residual_check
from periodic_stokes.verification.uniqueness import uniqueness_check

logger = logging.getLogger(__name__)

CONVERGENCE_RECIPES = ("single-mode-swirl", "boundary-layer")
UNIQUENESS_RECIPES = ("single-mode-swirl", "pressure-column", "boundary-layer", "composite")
INVARIANCE_TRIALS = 5
TIME_SHIFT_STEPS = 3
SCALE_FACTOR = 7.0


class Tolerances(BaseModel):
    """Pass thresholds of the property suites."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    exact: float = Field(1e-12, gt=0, description="Round trips, projections and identities.")
    oracle: float = Field(1e-6, gt=0, description="Relative oracle agreement.")
    oracle_edge: float = Field(1e-4, gt=0, description="Oracle agreement at the lattice edge.")
    order: float = Field(2.0, gt=0, description="Expected oracle self-convergence order.")
    order_band: float = Field(0.2, gt=0)
    recovery: float = Field(1e-6, gt=0, description="Relative manufactured recovery error.")
    residual_floor: float = Field(1e-10, gt=0)
    uniqueness: float = Field(1e-8, gt=0)
    audit_refinement: float = Field(0.05, gt=0)
    sweep_resolution: float = Field(0.10, gt=0)
    invariance: float = Field(1e-12, gt=0)


class SuiteConfig(BaseModel):
    """Sizes, seeds and thresholds of the property suites."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    q_values: tuple[float, ...] = (2.0, 4.0)
    seed: int = Field(0, ge=0)
    perturb_q0: bool = False
    partition_points: int = Field(10_000, ge=1)
    oracle_modes: int = Field(200, ge=1)
    oracle_nodes: int = Field(2049, ge=512)
    order_nodes: int = Field(513, ge=512)
    ensemble_size: int = Field(50, ge=1)
    estimate_time_modes: int = Field(8, ge=4)
    estimate_tangential_modes: int = Field(32, ge=10)
    audit_levels: int = Field(10, ge=3)
    recipes: tuple[str, ...] = tuple(CATALOGUE)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @property
    def options(self) -> SolverOptions:
        return SolverOptions(perturb_q0=self.perturb_q0)


class SuiteResult(BaseModel):
    """Outcome of one property suite."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    metrics: dict[str, float]
    failures: tuple[str, ...] = ()
    seconds: float = 0.0

    def rows(self) -> list[tuple[str, str, float, bool]]:
        """CSV rows (suite, metric, value, suite passed)."""
        return [(self.name, key, value, self.passed) for key, value in self.metrics.items()]


class Checks:
    """Metrics of a suite and the checks that failed."""

    def __init__(self) -> None:
        self.metrics: dict[str, float] = {}
        self.failures: list[str] = []

    def below(self, key: str, value: float, limit: float) -> None:
        self.metrics[key] = float(value)
        if not value < limit:
            self.failures.append(f"{key}={value:.3e} not below {limit:.1e}")

    def require(self, key: str, condition: bool) -> None:
        self.metrics[key] = float(condition)
        if not condition:
            self.failures.append(key)

    def record(self, key: str, value: float) -> None:
        self.metrics[key] = float(value)


def _relative(difference: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference))) if reference.size else 0.0
    peak = float(np.max(np.abs(difference))) if difference.size else 0.0
    return peak / scale if scale > 0.0 else peak


def with_resolution(grid: TorusPlaneGrid, time_modes: int, tangential_modes: int) -> TorusPlaneGrid:
    """The grid's geometry with another time and tangential lattice."""
    return type(grid)(
        **{**grid.model_dump(), "time_modes": time_modes, "tangential_modes": tangential_modes}
    )


# --- transforms and partition ---


def transforms_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    limit = config.tolerances.exact
    rng = np.random.default_rng(config.seed)
    for name, on_boundary in (("interior", False), ("boundary", True)):
        shape = grid.shape(grid.n, 1 if on_boundary else None)
        field = PhysicalField(
            grid=grid,
            values=rng.normal(size=shape),
            components=grid.n,
            on_boundary=on_boundary,
        )
        back = inverse_transform(forward_transform(field)).values
        checks.below(f"{name}.round_trip", _relative(back - field.values, field.values), limit)

    scalar = PhysicalField(grid=grid, values=rng.normal(size=grid.shape(1)), components=1)
    spec = forward_transform(scalar)
    steady, oscillatory = project_steady(spec), project_oscillatory(spec)
    identities = {
        "sum": steady + oscillatory - spec,
        "idempotent": project_steady(steady) - steady,
        "orthogonal": project_oscillatory(steady),
    }
    for key, defect in identities.items():
        checks.below(f"projection.{key}", _relative(defect.values, spec.values), limit)
    checks.below("projection.time_mean", _relative(steady.values[1:], spec.values), limit)
    return checks


def partition_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    limit = config.tolerances.exact
    rng = np.random.default_rng(config.seed)
    count = config.partition_points
    eta = rng.choice([-1.0, 1.0], count) * np.exp2(rng.uniform(-8.0, 8.0, count))
    xi = rng.normal(size=(count, grid.plane_dims)) * np.exp2(rng.uniform(-4.0, 4.0, (count, 1)))
    scale, bump = ParabolicScale(), BumpSpec()
    rho = scale(eta, np.linalg.norm(xi, axis=-1))
    shells = range(-16, 17)
    phis = np.stack([partition_phi(scale, bump, l, eta, xi) for l in shells])

    checks.below("sum_defect", float(np.max(np.abs(phis.sum(axis=0) - 1.0))), limit)
    checks.require("nonnegative", bool(np.all(phis >= 0.0)))
    outside = [
        np.all(phi[(rho < 2.0 ** (l - 1)) | (rho > 2.0 ** (l + 1))] == 0.0)
        for l, phi in zip(shells, phis, strict=True)
    ]
    checks.require("support", bool(all(outside)))

    for l in (1, 2):
        index = 4.0**l / grid.frequency
        if abs(index - round(index)) > 1e-12 or round(index) > grid.time_modes:
            logger.info(f"Shell {l} has no pure time mode on {grid.describe()}, skipped")
            continue
        omega = grid.frequency * round(index)
        field = PhysicalField.from_function(
            grid, lambda t, *xs, w=omega: [np.cos(w * t) * np.exp(-0.5 * xs[-1] ** 2)], 1
        )
        for q in config.q_values:
            besov = besov_decomposition(field, NormSpec(flavor="besov", s=0.5, q=q)).total
            expected = 2.0 ** (0.5 * l) * mixed_norm(field, NormSpec(flavor="lebesgue", q=q))
            checks.below(f"shell_{l}.q{q:g}.scaling", abs(besov - expected) / expected, limit)
    return checks


# --- oracle ---


def oracle_modes(grid: TorusPlaneGrid, count: int, seed: int = 0) -> list[tuple[int, ...]]:
    """
    ``count`` distinct lattice index tuples (time index, tangential indices...).

    Time indices run over 0..K and tangential indices over |j| < N/2, without the
    origin. The fundamental mode and the lattice corner are always included.
    """
    top = grid.tangential_modes // 2 - 1
    tangential = range(-top, top + 1)
    candidates = [
        (t, *xi)
        for t in range(grid.time_modes + 1)
        for xi in itertools.product(tangential, repeat=grid.plane_dims)
        if t != 0 or any(xi)
    ]
    fixed = [
        (1, 1) + (0,) * (grid.plane_dims - 1),
        (grid.time_modes, top) + (0,) * (grid.plane_dims - 1),
    ]
    rest = [c for c in candidates if c not in fixed]
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(rest), size=min(max(count - len(fixed), 0), len(rest)), replace=False)
    return sorted(fixed + [rest[int(i)] for i in picks])


def _mode_point(grid: TorusPlaneGrid, indices: tuple[int, ...]) -> ModePoint:
    return ModePoint(
        k=grid.frequency * indices[0],
        xi=tuple(grid.wavenumber * j for j in indices[1:]),
    )


def _boundary_coefficients(
    rng: np.random.Generator, mode: ModePoint
) -> tuple[list[complex], complex]:
    values = rng.normal(size=2 * len(mode.xi) + 2)
    tangential = [complex(values[2 * j], values[2 * j + 1]) for j in range(len(mode.xi))]
    normal = complex(values[-2], values[-1]) if mode.xi_norm > 0.0 else 0j
    return tangential, normal


def oracle_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    tol = config.tolerances
    rng = np.random.default_rng(config.seed)
    top = grid.tangential_modes // 2 - 1
    worst = {"interior": 0.0, "edge": 0.0}
    modes = oracle_modes(grid, config.oracle_modes, config.seed)
    for indices in modes:
        mode = _mode_point(grid, indices)
        tangential, normal = _boundary_coefficients(rng, mode)
        reference = oracle_reference(
            mode, tangential, normal, nodes=config.oracle_nodes, x_max=grid.x_max
        )
        velocity, pressure = mode_profiles(
            mode, tangential, normal, reference.nodes, perturb=config.perturb_q0
        )
        error = max(
            _relative(velocity - reference.velocity, reference.velocity),
            _relative(pressure - reference.pressure, reference.pressure),
        )
        edge = indices[0] == grid.time_modes or max(abs(j) for j in indices[1:]) == top
        key = "edge" if edge else "interior"
        if error > worst[key]:
            worst[key] = error
            logger.debug(f"Oracle gap {error:.3e} at mode indices {indices}")
    checks.record("modes", len(modes))
    checks.below("interior.relative", worst["interior"], tol.oracle)
    checks.below("edge.relative", worst["edge"], tol.oracle_edge)

    fundamental = (1, 1) + (0,) * (grid.plane_dims - 1)
    middle = (max(grid.time_modes // 2, 1), max(top // 2, 1)) + (0,) * (grid.plane_dims - 1)
    for name, indices in (("fundamental", fundamental), ("middle", middle)):
        mode = _mode_point(grid, indices)
        tangential, normal = _boundary_coefficients(rng, mode)
        order = self_convergence_order(
            mode, tangential, normal, nodes=config.order_nodes, x_max=grid.x_max
        )
        checks.below(f"order.{name}", abs(order - tol.order), tol.order_band)
    return checks


# --- closed-form identities ---


def random_boundary_data(grid: TorusPlaneGrid, seed: int = 0) -> BoundaryData:
    """Purely oscillatory compatible boundary data with content in every resolved mode."""
    rng = np.random.default_rng(seed)
    field = PhysicalField(
        grid=grid,
        values=rng.normal(size=grid.shape(grid.n, 1)),
        components=grid.n,
        on_boundary=True,
    )
    spec = remove_nyquist(project_oscillatory(forward_transform(field)))
    values = spec.values.copy()
    values[(slice(None),) + (0,) * grid.plane_dims + (slice(None), grid.n - 1)] = 0.0
    return BoundaryData.create(spec.replace(values=values))


def _peak(fields: list[SpectralField]) -> float:
    return max(float(np.max(np.abs(f.values))) for f in fields)


def identities_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    limit = config.tolerances.exact
    H = random_boundary_data(grid, config.seed)
    solution = solve_boundary_oscillatory(H, options=config.options)
    u, p = solution.velocity_spectral, solution.pressure_spectral
    momentum, div, trace = stokes_operator(u, p)

    checks.below("divergence", float(np.max(np.abs(div.values))) / _peak(gradient(u)), limit)
    terms = [spectral_derivative(u, "time"), laplacian(u), *gradient(p)]
    checks.below("momentum", float(np.max(np.abs(momentum.values))) / _peak(terms), limit)
    checks.below("trace", _relative(trace.values - H.spectral.values, H.spectral.values), limit)

    G, B = pressure_gradient_split(H, options=config.options)
    tangential = stack_components([spectral_derivative(p, j) for j in range(grid.plane_dims)])
    split = 1j * (G + B).values - tangential.values
    checks.below("pressure_split", _relative(split, tangential.values), limit)
    return checks


# --- manufactured solutions and uniqueness ---


def manufactured_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    tol = config.tolerances
    for recipe in config.recipes:
        case = manufactured_solution(recipe, grid)
        consistency = residual_check(case.solution, case.bundle).worst
        checks.below(f"{recipe}.consistency", consistency, tol.residual_floor)
        solution = solve_bundle(case.bundle, config.options)
        errors = recovery_errors(solution, case)
        checks.below(f"{recipe}.velocity", errors.velocity, tol.recovery)
        checks.below(f"{recipe}.pressure_gradient", errors.pressure_gradient, tol.recovery)

        if recipe not in CONVERGENCE_RECIPES:
            continue
        coarse = residual_check(solution, case.bundle).worst
        fine_case = manufactured_solution(recipe, grid.refine(2, 2))
        fine_solution = solve_bundle(fine_case.bundle, config.options)
        fine = residual_check(fine_solution, fine_case.bundle).worst
        checks.record(f"{recipe}.residual", coarse)
        checks.record(f"{recipe}.residual_refined", fine)
        converged = fine <= tol.residual_floor or (fine > 0.0 and coarse / fine >= 10.0)
        checks.require(f"{recipe}.residual_convergence", converged)
    return checks


def uniqueness_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    for recipe in UNIQUENESS_RECIPES:
        if recipe not in config.recipes:
            continue
        bundle = manufactured_solution(recipe, grid).bundle
        report = uniqueness_check(bundle, options=config.options)
        checks.below(f"{recipe}.velocity", report.velocity, config.tolerances.uniqueness)
        checks.below(
            f"{recipe}.pressure_gradient",
            max(report.pressure_gradient_tangential, report.pressure_gradient_normal),
            config.tolerances.uniqueness,
        )
    return checks


# --- symbol audits ---


def _vectorized(symbol: Callable[..., np.ndarray]) -> Callable[..., np.ndarray]:
    return lambda eta, *xi: symbol(eta, np.stack(xi, axis=-1))


def _profile(power: int, kind: ProfileKind) -> Callable[..., np.ndarray]:
    def profile(eta: np.ndarray, *rest: np.ndarray) -> np.ndarray:
        xi = np.stack(rest[:-1], axis=-1)
        return symbol_heat_profile(eta, xi, rest[-1], power, kind)

    return profile


def audit_reports(
    dimension: int, levels: int = 10, points_per_octave: int = 2
) -> list[AuditReport]:
    """Audits of M, M1, M2 and the normal profile symbols at one lattice density."""
    reports = [
        marcinkiewicz_audit(
            _vectorized(symbol),
            dimension,
            name=name,
            levels=levels,
            points_per_octave=points_per_octave,
        )
        for name, symbol in (("M", symbol_M), ("M1", symbol_M1), ("M2", symbol_M2))
    ]
    kinds: tuple[ProfileKind, ...] = ("parabolic", "tangential")
    for kind in kinds:
        for power in (0, 1):
            reports.append(
                audit_profile_symbol(
                    _profile(power, kind),
                    dimension,
                    default_profile_samples(),
                    name=f"{kind}_profile_{power}",
                    levels=levels,
                    points_per_octave=points_per_octave,
                )
            )
    return reports


def audit_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    try:
        coarse = audit_reports(grid.n, config.audit_levels, 2)
        fine = audit_reports(grid.n, config.audit_levels, 4)
    except SymbolAuditError as e:
        logger.error(f"Symbol audit failed: {e}")
        checks.require("finite", False)
        return checks
    checks.require("finite", True)
    for low, high in zip(coarse, fine, strict=True):
        checks.record(f"{high.name}.sup", high.sup)
        checks.record(f"{high.name}.divergent", float(high.divergent))
        change = refinement_change(low, high)
        checks.below(f"{high.name}.refinement", change, config.tolerances.audit_refinement)
    zeroth = "0" * grid.n
    bound = max(report.per_mask[zeroth] for report in fine if report.name == "M")
    checks.below("M.bound_excess", max(bound - 1.0, 0.0), config.tolerances.exact)
    return checks


# --- estimate ratios ---


def _ratio(
    trial: int, bundle: DataBundle, q: float, kind: EstimateKind, options: SolverOptions
) -> float:
    return estimate_row(trial, bundle, q, kind, options).ratio or 0.0


def estimates_suite(grid: TorusPlaneGrid, config: SuiteConfig) -> Checks:
    checks = Checks()
    tol = config.tolerances
    base = with_resolution(grid, config.estimate_time_modes, config.estimate_tangential_modes)
    kinds: tuple[EstimateKind, ...] = ("oscillatory", "steady")
    for kind in kinds:
        recipes = random_ensemble(grid.n, config.ensemble_size, config.seed, kind)
        for q in config.q_values:
            label = f"{kind}.q{q:g}"
            comparison = resolution_sweep(recipes, base, q, config.options)
            ratios = comparison.coarse.ratios + comparison.fine.ratios
            checks.require(f"{label}.finite", bool(np.all(np.isfinite(ratios))))
            checks.record(f"{label}.max", comparison.fine.max_ratio)
            checks.record(f"{label}.median", comparison.fine.median_ratio)
            checks.below(f"{label}.resolution_change", comparison.max_change, tol.sweep_resolution)

            scaled, shifted = 0.0, 0.0
            for recipe in recipes[:INVARIANCE_TRIALS]:
                bundle = recipe.sample(base)
                ratio = _ratio(recipe.trial, bundle, q, kind, config.options)
                if ratio == 0.0:
                    continue
                variants = (scale_bundle(bundle, SCALE_FACTOR), bundle.shifted(TIME_SHIFT_STEPS))
                factor, moved = (
                    _ratio(recipe.trial, variant, q, kind, config.options) for variant in variants
                )
                scaled = max(scaled, abs(factor - ratio) / ratio)
                shifted = max(shifted, abs(moved - ratio) / ratio)
            checks.below(f"{label}.scale_invariance", scaled, tol.invariance)
            checks.below(f"{label}.shift_invariance", shifted, tol.invariance)
    return checks


SUITES: dict[str, Callable[[TorusPlaneGrid, SuiteConfig], Checks]] = {
    "transforms": transforms_suite,
    "partition": partition_suite,
    "oracle": oracle_suite,
    "identities": identities_suite,
    "manufactured": manufactured_suite,
    "uniqueness": uniqueness_suite,
    "audit": audit_suite,
    "estimates": estimates_suite,
}


def run_suite(name: str, grid: TorusPlaneGrid, config: SuiteConfig | None = None) -> SuiteResult:
    """
    Run one named suite.

    Raises:
        KeyError: Unknown suite name.
    """
    config = config or SuiteConfig()
    suite = SUITES[name]
    start = time.perf_counter()
    try:
        checks = suite(grid, config)
    except StokesError as e:
        logger.exception(f"Suite {name} stopped")
        checks = Checks()
        checks.failures.append(f"{type(e).__name__}: {e}")
    seconds = time.perf_counter() - start
    result = SuiteResult(
        name=name,
        passed=not checks.failures,
        metrics=checks.metrics,
        failures=tuple(checks.failures),
        seconds=seconds,
    )
    status = "passed" if result.passed else f"FAILED ({'; '.join(result.failures)})"
    logger.info(f"Suite {name} {status} in {seconds:.2f}s")
    return result


def run_suites(
    grid: TorusPlaneGrid, config: SuiteConfig | None = None, names: list[str] | None = None
) -> list[SuiteResult]:
    return [run_suite(name, grid, config) for name in (names or list(SUITES))]
