"""
The subcommands. Each one validates its inputs, runs the library, writes its artifacts
and returns the process exit code.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from periodic_stokes.cli.artifacts import ArtifactWriter
from periodic_stokes.cli.run_config import RunConfig
from periodic_stokes.exceptions import ConfigError
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
    gradient_norm,
    lebesgue_values,
    mixed_norm,
    read_field,
)
from periodic_stokes.spectral_core.transforms import inverse_values
from periodic_stokes.symbols import refinement_change
from periodic_stokes.verification import (
    EstimateRatioReport,
    ManufacturedCase,
    estimate_constant_sweep,
    manufactured_solution,
    random_ensemble,
    recovery_errors,
    residual_check,
    resolution_sweep,
    run_suites,
)
from periodic_stokes.verification.suites import audit_reports

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1


class RunOptions(BaseModel):
    """Command-line overrides shared by every subcommand."""

    model_config = ConfigDict(frozen=True)

    out: str = "out"
    perturb_q0: bool = False
    resolution_scale: int = Field(1, ge=1)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(perturb_q0=self.perturb_q0)


@contextmanager
def timed(writer: ArtifactWriter, name: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        writer.timings[name] = time.perf_counter() - start


def _finish(
    writer: ArtifactWriter, config: RunConfig, passed: bool, **sections: dict[str, float]
) -> int:
    status = "passed" if passed else "failed"
    writer.write_summary(config.digest(), status, **sections)
    writer.write_timings()
    writer.write_manifest()
    logger.info(f"Run {status}; artifacts in {writer.out}")
    return EXIT_OK if passed else EXIT_FAILED


def _max_index(config: RunConfig, grid: TorusPlaneGrid) -> int:
    return min(config.sweep.max_index, grid.time_modes, grid.tangential_modes // 2 - 1)


def _read_bundle(config: RunConfig, grid: TorusPlaneGrid) -> DataBundle:
    paths = {key: getattr(config.data, key) for key in ("f", "g", "h")}
    try:
        fields = {key: read_field(path) for key, path in paths.items()}
        bundle = DataBundle(f=fields["f"], g=fields["g"], h=BoundaryData.create(fields["h"]))
    except (OSError, ValueError) as e:
        raise ConfigError(f"Unreadable data files: {e}") from e
    if not bundle.grid.matches(grid):
        raise ConfigError(
            f"Data files live on {bundle.grid.describe()}, the problem block asks for "
            f"{grid.describe()}"
        )
    return bundle


def build_bundle(
    config: RunConfig, grid: TorusPlaneGrid
) -> tuple[DataBundle, ManufacturedCase | None]:
    """The data of a solve, with its manufactured case when the generator is a recipe."""
    generator = config.data.generator
    if generator == "files":
        return _read_bundle(config, grid), None
    if generator == "random":
        recipe = random_ensemble(
            grid.n, 1, config.seed, config.data.kind, _max_index(config, grid)
        )[0]
        return recipe.sample(grid), None
    case = manufactured_solution(generator, grid)
    return case.bundle, case


def _stage_provenance(solution: StokesSolution, q: float) -> dict[str, dict[str, float]]:
    grid = solution.grid
    provenance: dict[str, dict[str, float]] = {}
    for name, stage in solution.stages.items():
        velocity = lebesgue_values(inverse_values(stage.velocity.values, grid), grid, q)
        provenance[name] = {
            "velocity": velocity,
            "pressure_gradient": gradient_norm(stage.pressure, q),
            "skipped": float(not (np.any(stage.velocity.values) or np.any(stage.pressure.values))),
        }
    return provenance


def cmd_solve(config: RunConfig, run: RunOptions) -> int:
    """
    Solve the configured problem and write u, p, the stage provenance and the residuals.

    Raises:
        CompatibilityError: The normal boundary data carry tangential mean at k != 0.
    """
    grid = config.problem.grid(run.resolution_scale)
    q = config.problem.q
    writer = ArtifactWriter(run.out)
    with timed(writer, "data"):
        bundle, case = build_bundle(config, grid)
    with timed(writer, "solve"):
        solution = solve_bundle(bundle, run.solver_options())
    with timed(writer, "residuals"):
        report = residual_check(solution, bundle, q)

    writer.write_field("u.field", solution.velocity)
    writer.write_field("p.field", solution.pressure)
    writer.write_json(
        "provenance.json",
        {
            "grid": grid.describe(),
            "generator": config.data.generator,
            "perturb_q0": run.perturb_q0,
            "q": q,
            "stages": _stage_provenance(solution, q),
        },
    )
    writer.write_csv("residuals.csv", ("part", "momentum", "divergence", "trace"), report.rows())
    writer.write_slices(solution)

    passed = report.within(config.tolerances.residual)
    residuals = {"momentum": report.momentum, "divergence": report.divergence}
    residuals["trace"] = report.trace
    norms = {
        "velocity": mixed_norm(solution.velocity, NormSpec(q=q)),
        "pressure_gradient": gradient_norm(solution.pressure_spectral, q),
    }
    if case is not None:
        recovery = recovery_errors(solution, case, q)
        writer.write_json("recovery.json", recovery.model_dump())
        residuals["recovery"] = recovery.worst
        passed = passed and recovery.worst < config.tolerances.recovery
    if not passed:
        logger.error(f"Residuals above tolerance: {residuals}")
    return _finish(writer, config, passed, norms=norms, residuals=residuals)


def cmd_verify(config: RunConfig, run: RunOptions) -> int:
    """Run the configured property suites; exit 0 iff every suite passes."""
    grid = config.problem.grid(run.resolution_scale)
    writer = ArtifactWriter(run.out)
    results = run_suites(grid, config.suite_config(run.perturb_q0), list(config.verify.suites))
    for result in results:
        writer.timings[result.name] = result.seconds
    writer.write_csv(
        "verify.csv",
        ("suite", "metric", "value", "passed"),
        [row for result in results for row in result.rows()],
    )
    writer.write_json(
        "verify.json",
        {
            "grid": grid.describe(),
            "perturb_q0": run.perturb_q0,
            "suites": [result.model_dump(exclude={"seconds"}) for result in results],
        },
    )
    failed = [result.name for result in results if not result.passed]
    if failed:
        logger.error(f"Failed suites: {failed}")
    return _finish(writer, config, not failed)


def _sweep_reports(
    config: RunConfig, grid: TorusPlaneGrid, q: float, options: SolverOptions
) -> tuple[EstimateRatioReport, float | None]:
    block = config.sweep
    if block.generator == "zero":
        ensemble = [DataBundle.zeros(grid)] * block.trials
        return estimate_constant_sweep(ensemble, q, block.kind, options, config.seed), None
    recipes = random_ensemble(
        grid.n, block.trials, config.seed, block.kind, _max_index(config, grid)
    )
    if block.compare_resolution:
        comparison = resolution_sweep(recipes, grid, q, options)
        return comparison.coarse, comparison.max_change
    ensemble = [recipe.sample(grid) for recipe in recipes]
    return estimate_constant_sweep(ensemble, q, block.kind, options, config.seed), None


def cmd_sweep(config: RunConfig, run: RunOptions) -> int:
    """Estimate ratios over a seeded ensemble, one CSV row per trial and exponent."""
    grid = config.problem.grid(run.resolution_scale)
    writer = ArtifactWriter(run.out)
    rows: list[tuple[object, ...]] = []
    ratios: dict[str, float] = {}
    passed = True
    for q in config.sweep.q_values:
        with timed(writer, f"q{q:g}"):
            report, change = _sweep_reports(config, grid, q, run.solver_options())
        rows += [(q, *row) for row in report.csv_rows()]
        ratios[f"q{q:g}.max"] = report.max_ratio
        ratios[f"q{q:g}.median"] = report.median_ratio
        if report.degenerate:
            logger.warning(f"Degenerate trials at q={q:g}: {report.degenerate}")
        if change is not None:
            ratios[f"q{q:g}.resolution_change"] = change
            if not change < config.tolerances.sweep_resolution:
                logger.error(f"Ensemble maximum moved {change:.2%} under refinement at q={q:g}")
                passed = False
        passed = passed and all(np.isfinite(report.ratios))
    writer.write_csv(
        "sweep.csv",
        ("q", "trial", "lhs", "rhs", "ratio", "degenerate", "besov_flagged"),
        rows,
    )
    return _finish(writer, config, passed, ratios=ratios)


def _single_shell(grid: TorusPlaneGrid, l: int, m: int) -> PhysicalField | None:
    """A pure time mode at parabolic length 2^l, or None when the lattice has none."""
    index = 2.0 ** (2 * m * l) / grid.frequency
    if abs(index - round(index)) > 1e-12 or not 0 < round(index) <= grid.time_modes:
        return None
    omega = grid.frequency * round(index)
    return PhysicalField.from_function(
        grid, lambda t, *xs: [np.cos(omega * t) * np.exp(-0.5 * xs[-1] ** 2)], 1
    )


def cmd_besov(config: RunConfig, run: RunOptions) -> int:
    """Shell tables of the configured field files and the single-shell scaling rows."""
    grid = config.problem.grid(run.resolution_scale)
    block, q = config.besov, config.problem.q
    spec = NormSpec(flavor="besov", s=block.s, q=q, m=block.m)
    writer = ArtifactWriter(run.out)
    rows: list[tuple[str, int, float, float, float, str]] = []
    norms: dict[str, float] = {}
    passed = True
    for l in block.shells:
        field = _single_shell(grid, l, block.m)
        if field is None:
            logger.warning(f"Shell {l} has no pure time mode on {grid.describe()}, skipped")
            continue
        total = besov_decomposition(field, spec).total
        lebesgue = mixed_norm(field, NormSpec(q=q))
        expected = 2.0 ** (block.s * l) * lebesgue
        rows.append((f"single-shell-{l}", l, lebesgue, expected, total, repr(expected)))
        norms[f"single-shell-{l}"] = total
        passed = passed and abs(total - expected) <= config.tolerances.exact * expected
    for path in block.fields:
        try:
            breakdown = besov_decomposition(read_field(path), spec)
        except (OSError, ValueError) as e:
            raise ConfigError(f"Unreadable Besov field {path}: {e}") from e
        rows += [
            (path, l, value, weighted, breakdown.total, "")
            for l, value, weighted in zip(
                breakdown.shells, breakdown.shell_norms, breakdown.weighted, strict=True
            )
        ]
        norms[path] = breakdown.total
    writer.write_csv(
        "besov.csv", ("source", "shell", "shell_norm", "weighted", "total", "expected"), rows
    )
    return _finish(writer, config, passed, norms=norms)


def cmd_symbols_audit(config: RunConfig, run: RunOptions) -> int:
    """Marcinkiewicz audits of the configured symbols, with the refinement check."""
    block = config.audit
    dimension = config.problem.n
    writer = ArtifactWriter(run.out)
    densities = [block.points_per_octave]
    if block.refine:
        densities.append(2 * block.points_per_octave)
    with timed(writer, "audit"):
        sweeps = [
            [r for r in audit_reports(dimension, block.levels, p) if r.name in block.symbols]
            for p in densities
        ]
    rows = [
        (*row, report.divergent)
        for reports in sweeps
        for report in reports
        for row in report.rows()
    ]
    header = ("symbol", "mask", "sup", "points_per_octave", "divergent")
    writer.write_csv("audit.csv", header, rows)
    norms = {report.name: report.sup for report in sweeps[-1]}
    ratios: dict[str, float] = {}
    passed = not any(report.divergent for report in sweeps[-1])
    if block.refine:
        for coarse, fine in zip(*sweeps, strict=True):
            change = refinement_change(coarse, fine)
            ratios[f"{fine.name}.refinement"] = change
            passed = passed and change < config.tolerances.audit_refinement
    return _finish(writer, config, passed, norms=norms, ratios=ratios)


COMMANDS: dict[str, Callable[[RunConfig, RunOptions], int]] = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "besov": cmd_besov,
    "symbols-audit": cmd_symbols_audit,
}
