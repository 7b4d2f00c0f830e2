import numpy as np
import pytest
from pydantic import ValidationError

from periodic_stokes.exceptions import ManufacturedError, OracleError
from periodic_stokes.solvers import DataBundle, mode_profiles, solve_bundle
from periodic_stokes.symbols import ModePoint
from periodic_stokes.verification import (
    CATALOGUE,
    SUITES,
    BundleRecipe,
    DataTerm,
    ResidualReport,
    SuiteConfig,
    bvp_oracle,
    estimate_constant_sweep,
    estimate_row,
    manufactured_solution,
    oracle_grid,
    oracle_reference,
    random_ensemble,
    recovery_errors,
    residual_check,
    run_suite,
    run_suites,
    scale_bundle,
    self_convergence_order,
    uniqueness_check,
)

MODE = ModePoint(k=1.0, xi=(1.0,))
TANGENTIAL = [1.0 + 0.5j]
NORMAL = 0.5 - 0.25j


class TestManufactured:
    def test_data_are_consistent(self, grid):
        """The manufactured pair satisfies its own data."""
        case = manufactured_solution("composite", grid)
        assert residual_check(case.solution, case.bundle).worst < 1e-10

    @pytest.mark.parametrize("recipe", sorted(CATALOGUE))
    def test_recovery(self, grid, recipe):
        """Solving the induced data recovers u* and grad p*."""
        case = manufactured_solution(recipe, grid)
        errors = recovery_errors(solve_bundle(case.bundle), case)
        assert errors.velocity < 1e-6
        assert errors.pressure_gradient < 1e-6

    def test_zero_recipe_is_absolute(self, grid):
        """Without a scale the errors are absolute."""
        case = manufactured_solution("zero", grid)
        assert not recovery_errors(solve_bundle(case.bundle), case).relative

    def test_unknown_recipe(self, grid):
        """Unknown recipes are rejected."""
        with pytest.raises(ManufacturedError):
            manufactured_solution("vortex-street", grid)

    def test_uniqueness(self, grid):
        """Two extension boxes give the same velocity and pressure gradient."""
        bundle = manufactured_solution("single-mode-swirl", grid).bundle
        report = uniqueness_check(bundle)
        assert report.passes()
        assert report.extension_factors == (1, 2)


class TestResiduals:
    def test_rows_start_with_total(self, grid):
        """The first row is the total; the stages follow."""
        case = manufactured_solution("single-mode-swirl", grid)
        report = residual_check(solve_bundle(case.bundle), case.bundle)
        rows = report.rows()
        assert rows[0][0] == "total"
        assert [row[0] for row in rows[1:]] == ["steady", "heat_lift", "corrector", "boundary"]
        assert report.within(1e-8)

    def test_periodicity_defect_must_vanish(self):
        """Fields on the time torus cannot carry a periodicity defect."""
        with pytest.raises(ValidationError):
            ResidualReport(q=2.0, momentum=0.0, divergence=0.0, trace=0.0, periodicity_defect=1.0)


class TestEstimates:
    def test_ensemble_is_seeded(self):
        """The same seed draws the same recipes."""
        assert random_ensemble(2, 5, seed=3) == random_ensemble(2, 5, seed=3)
        assert random_ensemble(2, 5, seed=3) != random_ensemble(2, 5, seed=4)

    def test_ensemble_is_compatible(self, grid):
        """Every recipe avoids the tangential mean, so every bundle is compatible."""
        for recipe in random_ensemble(2, 10, seed=1):
            assert all(term.tangential_index[0] != 0 for term in recipe.terms)
            assert all(term.time_index >= 1 for term in recipe.terms)
            assert recipe.sample(grid).h.compat_normal

    def test_unresolved_term(self, grid):
        """Terms beyond the lattice are refused."""
        term = DataTerm(target="f", time_index=9, tangential_index=(1,), amplitude=(1.0, 0.0))
        recipe = BundleRecipe(seed=0, trial=0, kind="oscillatory", n=2, terms=(term,))
        with pytest.raises(ValueError):
            recipe.sample(grid)

    def test_zero_data_are_degenerate(self, grid):
        """Zero data give a degenerate row without a ratio."""
        row = estimate_row(0, DataBundle.zeros(grid), 2.0)
        assert row.degenerate
        assert row.ratio is None
        report = estimate_constant_sweep([DataBundle.zeros(grid)])
        assert report.degenerate == [0]
        assert report.max_ratio == 0.0
        assert report.csv_rows()[0][3] == ""

    def test_empty_ensemble(self):
        """A sweep needs at least one bundle."""
        with pytest.raises(ValueError):
            estimate_constant_sweep([])

    def test_ratio_invariance(self, grid):
        """The ratio ignores amplitude and time translation."""
        bundle = random_ensemble(2, 1, seed=5)[0].sample(grid)
        ratio = estimate_row(0, bundle, 2.0).ratio
        assert ratio is not None and ratio > 0.0
        scaled = estimate_row(0, scale_bundle(bundle, 7.0), 2.0).ratio
        shifted = estimate_row(0, bundle.shifted(3), 2.0).ratio
        assert scaled == pytest.approx(ratio, rel=1e-12)
        assert shifted == pytest.approx(ratio, rel=1e-12)


class TestOracle:
    def test_matches_mode_profiles(self):
        """The extrapolated finite-difference profiles agree with the closed form."""
        reference = oracle_reference(MODE, TANGENTIAL, NORMAL)
        velocity, pressure = mode_profiles(MODE, TANGENTIAL, NORMAL, reference.nodes)
        scale = np.max(np.abs(reference.velocity))
        assert np.max(np.abs(velocity - reference.velocity)) / scale < 1e-6
        scale = np.max(np.abs(reference.pressure))
        assert np.max(np.abs(pressure - reference.pressure)) / scale < 1e-6

    def test_second_order(self):
        """The oracle converges at second order."""
        order = self_convergence_order(MODE, TANGENTIAL, NORMAL)
        assert abs(order - 2.0) < 0.2

    def test_pressure_error_falls_at_second_order(self):
        """Halving the grid spacing quarters the pressure error against the closed form."""
        errors = []
        for nodes in (1025, 2049):
            x = oracle_grid(MODE, nodes)
            raw = bvp_oracle(MODE, TANGENTIAL, NORMAL, x)
            _, pressure = mode_profiles(MODE, TANGENTIAL, NORMAL, x)
            errors.append(np.max(np.abs(raw.pressure - pressure)) / np.max(np.abs(pressure)))
        assert errors[0] / errors[1] > 3.5
        assert errors[1] < 1e-4

    def test_steady_mode_pressure(self):
        """A steady mode with normal data matches the closed-form pressure after extrapolation."""
        mode = ModePoint(k=0.0, xi=(2.0,))
        reference = oracle_reference(mode, [0.5j], 1.0)
        _, pressure = mode_profiles(mode, [0.5j], 1.0, reference.nodes)
        scale = np.max(np.abs(pressure))
        assert np.max(np.abs(pressure - reference.pressure)) / scale < 1e-6

    def test_too_few_nodes(self):
        """The oracle refuses coarse grids."""
        with pytest.raises(OracleError):
            bvp_oracle(MODE, TANGENTIAL, NORMAL, np.linspace(0.0, 20.0, 100))

    def test_singular_origin(self):
        """(k, xi) = (0, 0) has no oracle."""
        with pytest.raises(OracleError):
            bvp_oracle(ModePoint(k=0.0, xi=(0.0,)), [1.0], 0.0, np.linspace(0.0, 20.0, 600))


class TestSuites:
    def test_transforms(self, grid):
        """Round trips and projections hold to roundoff."""
        assert run_suite("transforms", grid).passed

    def test_partition(self, grid):
        """The partition sums to one and scales single time modes."""
        result = run_suite("partition", grid, SuiteConfig(partition_points=1000))
        assert result.passed, result.failures

    def test_oracle(self, grid):
        """A few lattice modes agree with the oracle."""
        result = run_suite("oracle", grid, SuiteConfig(oracle_modes=3))
        assert result.passed, result.failures
        assert result.metrics["modes"] == 3.0

    def test_oracle_detects_perturbation(self, grid):
        """The perturbed pressure no longer matches the oracle."""
        result = run_suite("oracle", grid, SuiteConfig(oracle_modes=3, perturb_q0=True))
        assert not result.passed

    def test_errors_become_failures(self, grid, monkeypatch):
        """A suite that raises is reported as failed instead of propagating."""

        def broken(grid, config):
            raise ManufacturedError("no such recipe")

        monkeypatch.setitem(SUITES, "transforms", broken)
        result = run_suite("transforms", grid)
        assert not result.passed
        assert result.failures == ("ManufacturedError: no such recipe",)

    def test_rows(self, grid):
        """Every metric becomes a row tagged with the suite verdict."""
        (result,) = run_suites(grid, names=["transforms"])
        rows = result.rows()
        assert len(rows) == len(result.metrics)
        assert all(row[0] == "transforms" and row[3] for row in rows)

    def test_unknown_suite(self, grid):
        """Unknown suites are a KeyError."""
        with pytest.raises(KeyError):
            run_suite("nonsense", grid)
