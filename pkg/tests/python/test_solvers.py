import numpy as np
import pytest

from periodic_stokes.exceptions import (
    CompatibilityError,
    PreconditionError,
    SymbolDomainError,
)
from periodic_stokes.solvers import (
    BoundaryData,
    DataBundle,
    SolverOptions,
    heat_lift,
    mode_profiles,
    solve_bundle,
    solve_full,
    solve_steady,
    steady_null_family,
    time_shift,
)
from periodic_stokes.solvers.corrector import divergence_corrector
from periodic_stokes.solvers.extension import ExtensionLattice
from periodic_stokes.solvers.heat import lattice_samples
from periodic_stokes.spectral_core import PhysicalField, forward_transform
from periodic_stokes.symbols import ModePoint
from periodic_stokes.verification import (
    manufactured_solution,
    recovery_errors,
    residual_check,
    run_suite,
)
from periodic_stokes.verification.suites import SuiteConfig


def _boundary(grid, function):
    return BoundaryData(field=PhysicalField.from_function(grid, function, grid.n, on_boundary=True))


class TestCompatibility:
    def test_oscillating_normal_flux_is_rejected(self, grid):
        """h_n = sin t, constant in x', violates the flux condition at k = +-1."""
        h = _boundary(grid, lambda t, x, xn: [0.0 * t, np.sin(t)])
        assert h.offending_frequencies == [-1, 1]
        assert not h.compat_normal
        bundle = DataBundle.zeros(grid)
        with pytest.raises(CompatibilityError) as info:
            solve_full(bundle.f, bundle.g, h)
        assert info.value.frequencies == [-1, 1]

    def test_steady_normal_flux_is_rejected(self, grid):
        """A constant h_n has no decaying steady solution."""
        h = _boundary(grid, lambda t, x, xn: [0.0 * t, 1.0 + 0.0 * t])
        assert h.compat_normal
        bundle = DataBundle.zeros(grid)
        with pytest.raises(CompatibilityError) as info:
            solve_full(bundle.f, bundle.g, h)
        assert info.value.frequencies == [0]

    def test_divergence_with_mean_is_rejected(self, grid):
        """Divergence data with a nonzero spatial mean cannot be corrected."""
        g = PhysicalField.from_function(grid, lambda t, x, xn: [np.sin(t) * np.exp(-(xn**2))], 1)
        bundle = DataBundle.zeros(grid)
        with pytest.raises(CompatibilityError):
            solve_full(bundle.f, g, bundle.h)


class TestDivergenceFreeData:
    @pytest.mark.parametrize(
        "recipe",
        ["steady-swirl", "steady-boundary-layer", "single-mode-swirl", "boundary-layer"],
    )
    def test_solves_without_compatibility_error(self, grid, recipe):
        """Forcing with divergence-free g leaves a roundoff residual that is not a mean."""
        case = manufactured_solution(recipe, grid)
        assert recovery_errors(solve_bundle(case.bundle), case).worst < 1e-6

    def test_mean_is_measured_against_the_data(self, grid):
        """A roundoff spatial mean passes once compared with the size of the data."""
        lattice = ExtensionLattice.for_grid(grid, SolverOptions().extension_factor)
        zeros = np.zeros(grid.shape(1), dtype=np.complex128)
        samples = lattice_samples(zeros, grid, lattice)
        samples[0, 0] += 1e-20
        stage = divergence_corrector(samples, grid, data_scale=1.0)
        assert np.max(np.abs(stage.velocity.values)) < 1e-15
        with pytest.raises(CompatibilityError):
            divergence_corrector(samples, grid)

    def test_real_mean_is_still_rejected(self, grid):
        """A mean well above roundoff is incompatible at any data scale."""
        lattice = ExtensionLattice.for_grid(grid, SolverOptions().extension_factor)
        samples = lattice_samples(np.zeros(grid.shape(1), dtype=np.complex128), grid, lattice)
        samples[0, 0] += 1e-3
        with pytest.raises(CompatibilityError) as info:
            divergence_corrector(samples, grid, data_scale=1.0)
        assert info.value.frequencies == [0]


class TestSolveFull:
    def test_zero_data(self, grid):
        """Zero data give the zero solution with every stage recorded."""
        solution = solve_bundle(DataBundle.zeros(grid))
        assert set(solution.stages) == {"steady", "heat_lift", "corrector", "boundary"}
        assert not np.any(solution.velocity.values)
        assert not np.any(solution.pressure.values)

    def test_full_period_shift_is_identity(self, grid, rng):
        """Shifting by 2K + 1 time steps returns the same samples."""
        field = PhysicalField(grid=grid, values=rng.normal(size=grid.shape(1)), components=1)
        np.testing.assert_array_equal(time_shift(field, grid.time_samples).values, field.values)

    def test_recovery_in_three_dimensions(self, grid3):
        """The swirl is recovered on T x T^2 x R_+."""
        case = manufactured_solution("single-mode-swirl", grid3)
        errors = recovery_errors(solve_bundle(case.bundle), case)
        assert errors.worst < 1e-6

    def test_boundary_identities(self, grid):
        """The boundary solution satisfies the homogeneous equations and the trace."""
        result = run_suite("identities", grid)
        assert result.passed, result.failures

    def test_perturbed_pressure_breaks_identities(self, grid):
        """Flipping the tangential pressure term is detected."""
        result = run_suite("identities", grid, SuiteConfig(perturb_q0=True))
        assert not result.passed

    def test_perturbation_is_an_option(self):
        """The fault injection is off unless requested."""
        assert not SolverOptions().perturb_q0


class TestSteady:
    def test_null_family_has_zero_residual(self, grid):
        """The shear flow solves the steady problem with zero data."""
        shear = steady_null_family(grid, [1.5])
        np.testing.assert_allclose(
            shear.velocity.values[0, 0, :, 0], 1.5 * grid.nodes, rtol=1e-12, atol=1e-12
        )
        report = residual_check(shear, DataBundle.zeros(grid))
        assert report.worst < 1e-10

    def test_null_family_size(self, grid):
        """The family has one slope per tangential direction."""
        with pytest.raises(ValueError):
            steady_null_family(grid, [1.0, 2.0])

    def test_steady_trace(self, grid):
        """The steady velocity takes the boundary values."""
        h = _boundary(grid, lambda t, x, xn: [np.cos(x) + 0.0 * t, 0.0 * t])
        zeros = DataBundle.zeros(grid)
        velocity, _ = solve_steady(zeros.f, zeros.g, h)
        np.testing.assert_allclose(
            velocity.values[..., 0, :], h.field.values[..., 0, :], atol=1e-10
        )


class TestStages:
    def test_heat_lift_needs_oscillatory_forcing(self, grid):
        """Forcing with a time mean is refused by the heat lift."""
        f = PhysicalField(grid=grid, values=np.ones(grid.shape(grid.n)), components=grid.n)
        with pytest.raises(PreconditionError):
            heat_lift(forward_transform(f))

    def test_mode_profiles_take_boundary_values(self):
        """At x_n = 0 every profile equals the boundary data."""
        x = np.linspace(0.0, 5.0, 11)
        for mode in (ModePoint(k=1.0, xi=(1.0,)), ModePoint(k=0.0, xi=(2.0,))):
            velocity, pressure = mode_profiles(mode, [1.0 + 0.5j], 0.3j, x)
            assert velocity.shape == (11, 2)
            assert pressure.shape == (11,)
            np.testing.assert_allclose(velocity[0], [1.0 + 0.5j, 0.3j], atol=1e-12)
            assert np.all(np.abs(velocity[-1]) < np.abs(velocity[0]))

    def test_mode_profiles_domain(self):
        """Normal data at xi = 0 have no decaying profile."""
        with pytest.raises(SymbolDomainError):
            mode_profiles(ModePoint(k=1.0, xi=(0.0,)), [0.0], 1.0, np.zeros(1))
