import logging

import numpy as np
import pytest
from pydantic import ValidationError

from periodic_stokes.exceptions import GridError, NonHermitianError, NormError
from periodic_stokes.spectral_core import (
    NormSpec,
    PhysicalField,
    SpectralField,
    TorusPlaneGrid,
    besov_decomposition,
    divergence,
    forward_transform,
    gradient_norm,
    inverse_transform,
    mixed_norm,
    project_oscillatory,
    project_steady,
    read_field,
    remove_nyquist,
    spectral_derivative,
    trace,
    write_field,
)


def _random_field(grid, rng, components=1, on_boundary=False):
    shape = grid.shape(components, 1 if on_boundary else None)
    return PhysicalField(
        grid=grid, values=rng.normal(size=shape), components=components, on_boundary=on_boundary
    )


class TestTorusPlaneGrid:
    def test_uniform_grid_sizes(self, grid):
        """2K + 1 time samples, N tangential samples and the requested normal nodes."""
        assert grid.time_samples == 9
        assert grid.lattice_dims == (9, 16)
        assert grid.shape(2) == (9, 16, 81, 2)
        assert grid.shape(1, nodes=1) == (9, 16, 1, 1)
        assert grid.lattice_cells == 80
        assert grid.x_max == 20.0

    def test_graded_grid_contains_lattice(self):
        """The graded reference grid refines toward the wall and embeds a uniform lattice."""
        graded = TorusPlaneGrid.create()
        assert graded.node_count <= 128
        assert graded.nodes[1] == pytest.approx(20.0 / 1e4)
        lattice = np.linspace(0.0, 20.0, graded.lattice_cells + 1)
        np.testing.assert_allclose(graded.lattice_nodes, lattice, atol=1e-12)

    def test_frequencies(self, grid):
        """Fundamental frequencies and FFT-ordered indices."""
        assert grid.frequency == pytest.approx(1.0)
        assert grid.wavenumber == pytest.approx(1.0)
        assert list(grid.time_indices) == [0, 1, 2, 3, 4, -4, -3, -2, -1]

    def test_refine_keeps_geometry(self, grid):
        """Refinement doubles K and N and keeps the normal grid."""
        fine = grid.refine(2, 2)
        assert fine.time_modes == 8
        assert fine.tangential_modes == 32
        assert fine.normal_grid == grid.normal_grid
        assert not fine.matches(grid)

    def test_invalid_parameters(self):
        """Bad extents and node counts raise GridError."""
        with pytest.raises(GridError):
            TorusPlaneGrid.create(x_max=-1.0)
        with pytest.raises(GridError):
            TorusPlaneGrid.create(nodes=2)
        with pytest.raises(ValueError):
            TorusPlaneGrid.create(x_max=float("inf"))

    def test_immutable(self, grid):
        """Grids are frozen."""
        with pytest.raises(ValidationError):
            grid.time_modes = 8


class TestTransforms:
    @pytest.mark.parametrize("on_boundary", [False, True])
    def test_round_trip(self, grid, rng, on_boundary):
        """Forward then inverse transform reproduces the samples."""
        field = _random_field(grid, rng, 2, on_boundary)
        back = inverse_transform(forward_transform(field))
        assert np.max(np.abs(back.values - field.values)) < 1e-12 * np.max(np.abs(field.values))
        assert back.on_boundary == on_boundary

    def test_zero_mode_is_mean(self, grid, rng):
        """The (k, xi) = (0, 0) coefficient is the time and box average."""
        field = _random_field(grid, rng)
        spec = forward_transform(field)
        np.testing.assert_allclose(
            spec.values[0, 0].real, field.values.mean(axis=(0, 1)), atol=1e-13
        )

    def test_non_hermitian_input(self, grid):
        """Coefficients without their conjugate partner are rejected."""
        values = np.zeros(grid.shape(1), dtype=np.complex128)
        values[1, 0] = 1.0
        spec = SpectralField(grid=grid, values=values, components=1)
        with pytest.raises(NonHermitianError):
            inverse_transform(spec)

    def test_projections(self, grid, rng):
        """P + P^perp = id, P is idempotent and P^perp kills the time mean."""
        spec = forward_transform(_random_field(grid, rng))
        steady, oscillatory = project_steady(spec), project_oscillatory(spec)
        np.testing.assert_allclose((steady + oscillatory).values, spec.values, atol=1e-15)
        np.testing.assert_array_equal(project_steady(steady).values, steady.values)
        assert not np.any(project_oscillatory(steady).values)
        assert not np.any(steady.values[1:])

    def test_tangential_derivative(self, grid):
        """d_1 sin(x_1) = cos(x_1)."""
        field = PhysicalField.from_function(
            grid, lambda t, x, y: [np.sin(x) * np.exp(-(y**2))], 1
        )
        expected = PhysicalField.from_function(
            grid, lambda t, x, y: [np.cos(x) * np.exp(-(y**2))], 1
        )
        derivative = inverse_transform(spectral_derivative(forward_transform(field), 0))
        np.testing.assert_allclose(derivative.values, expected.values, atol=1e-12)

    def test_time_derivative(self, grid):
        """d_t sin(t) = cos(t)."""
        field = PhysicalField.from_function(grid, lambda t, x, y: [np.sin(t) + 0.0 * x * y], 1)
        derivative = inverse_transform(spectral_derivative(forward_transform(field), "time"))
        expected = np.cos(grid.times)[:, None, None, None]
        np.testing.assert_allclose(
            derivative.values, np.broadcast_to(expected, grid.shape(1)), atol=1e-12
        )

    def test_normal_derivative_prefers_twins(self, grid, rng):
        """Analytic twins are used when present, finite differences otherwise."""
        field = PhysicalField.from_function(grid, lambda t, x, y: [y**2 + 0.0 * t * x], 1)
        spec = forward_transform(field)
        fd = inverse_transform(spectral_derivative(spec, "normal"))
        np.testing.assert_allclose(fd.values[0, 0, :, 0], 2.0 * grid.nodes, atol=1e-10)

        twin = np.full(spec.values.shape, 3.0 + 0.0j)
        with_twin = spec.replace(normal_derivatives=(twin,))
        np.testing.assert_array_equal(spectral_derivative(with_twin, "normal").values, twin)

    def test_nyquist_removal_warns(self, grid, caplog):
        """Content on the tangential Nyquist index is dropped with a warning."""
        field = PhysicalField.from_function(grid, lambda t, x, y: [np.cos(8.0 * x) + 0 * t * y], 1)
        with caplog.at_level(logging.WARNING):
            cleaned = remove_nyquist(forward_transform(field))
        assert "Nyquist" in caplog.text
        assert np.max(np.abs(cleaned.values)) < 1e-12

    def test_divergence_needs_vector(self, grid, rng):
        """A scalar field has no divergence."""
        with pytest.raises(GridError):
            divergence(forward_transform(_random_field(grid, rng)))

    def test_trace(self, grid, rng):
        """The trace keeps the first normal node."""
        spec = forward_transform(_random_field(grid, rng, 2))
        boundary = trace(spec)
        assert boundary.on_boundary
        np.testing.assert_array_equal(boundary.values[..., 0, :], spec.values[..., 0, :])


class TestNorms:
    @pytest.mark.parametrize("q", [2.0, 4.0])
    def test_lebesgue_of_constant(self, grid, q):
        """Averaged measures in t and x', trapezoidal quadrature over [0, X_max]."""
        field = PhysicalField(grid=grid, values=np.ones(grid.shape(1)), components=1)
        assert mixed_norm(field, NormSpec(q=q)) == pytest.approx(20.0 ** (1.0 / q), rel=1e-12)

    def test_vector_magnitude_on_boundary(self, grid):
        """Vector fields use the pointwise Euclidean magnitude."""
        values = np.broadcast_to(np.array([3.0, 4.0]), grid.shape(2, 1))
        field = PhysicalField(grid=grid, values=values, components=2, on_boundary=True)
        assert mixed_norm(field, NormSpec(q=3.0)) == pytest.approx(5.0, rel=1e-12)

    def test_sobolev_orders_validated(self):
        """Sobolev norms take r in {0, 1} and s in {0, 1, 2}."""
        with pytest.raises(ValidationError):
            NormSpec(flavor="sobolev", s=3.0)

    @pytest.mark.parametrize("q", [2.0, 4.0])
    def test_single_shell_besov_scaling(self, grid, q):
        """A field on the shell l = 1 has Besov norm 2^{s} times its L^q norm."""
        field = PhysicalField.from_function(
            grid, lambda t, x, y: [np.cos(4.0 * t) * np.exp(-0.5 * y**2) + 0.0 * x], 1
        )
        breakdown = besov_decomposition(field, NormSpec(flavor="besov", s=0.5, q=q))
        expected = np.sqrt(2.0) * mixed_norm(field, NormSpec(q=q))
        assert abs(breakdown.total - expected) < 1e-12 * expected

    def test_besov_needs_oscillatory_field(self, grid):
        """A nonzero time mean is outside the Besov norm's domain."""
        field = PhysicalField.from_function(grid, lambda t, x, y: [np.exp(-(y**2)) + 0 * t * x], 1)
        with pytest.raises(NormError):
            mixed_norm(field, NormSpec(flavor="besov", s=0.5))

    def test_negative_homogeneous_order_needs_zero_mean(self, grid):
        """|xi|^s with s < 0 is undefined on xi = 0 content."""
        field = PhysicalField.from_function(
            grid, lambda t, x, y: [np.cos(t) * np.exp(-(y**2)) + 0 * x], 1
        )
        with pytest.raises(NormError):
            mixed_norm(field, NormSpec(flavor="homogeneous", r=1.0, s=-0.5))

    def test_gradient_norm_order(self, grid, rng):
        """Only gradients and Hessians are supported."""
        with pytest.raises(ValueError):
            gradient_norm(_random_field(grid, rng), 2.0, order=3)


class TestFieldFiles:
    @pytest.mark.parametrize("on_boundary", [False, True])
    def test_read_back(self, grid, rng, tmp_path, on_boundary):
        """A written field reads back with the same grid and samples."""
        field = _random_field(grid, rng, 2, on_boundary)
        back = read_field(write_field(tmp_path / "u.field", field))
        assert back.grid.matches(grid)
        assert back.on_boundary == on_boundary
        np.testing.assert_array_equal(back.values, field.values)

    def test_identical_fields_identical_bytes(self, grid, rng, tmp_path):
        """Writing is deterministic."""
        field = _random_field(grid, rng)
        first = write_field(tmp_path / "a.field", field).read_bytes()
        second = write_field(tmp_path / "b.field", field).read_bytes()
        assert first == second

    def test_missing_file(self, tmp_path):
        """Reading a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_field(tmp_path / "missing.field")
