import numpy as np
import pytest

from periodic_stokes.exceptions import SymbolAuditError, SymbolDomainError
from periodic_stokes.symbols import (
    AuditReport,
    BumpSpec,
    ModePoint,
    ParabolicScale,
    marcinkiewicz_audit,
    partition_phi,
    principal_root,
    q0_symbol,
    q1_q2_split,
    refinement_change,
    shell_range,
    shell_weight,
    symbol_heat_profile,
    symbol_M,
    symbol_M1,
    symbol_M2,
)
from periodic_stokes.verification.suites import audit_reports


def _samples(rng, count=2000, dims=1):
    eta = rng.choice([-1.0, 1.0], count) * np.exp2(rng.uniform(-8.0, 8.0, count))
    xi = rng.normal(size=(count, dims)) * np.exp2(rng.uniform(-4.0, 4.0, (count, 1)))
    return eta, xi


class TestModes:
    def test_principal_root(self, rng):
        """lambda^2 = |xi|^2 + ik with nonnegative real part."""
        k = rng.normal(size=100) * 10.0
        xi = np.abs(rng.normal(size=100))
        root = principal_root(k, xi)
        np.testing.assert_allclose(root**2, xi**2 + 1j * k, rtol=1e-12, atol=1e-12)
        assert np.all(root.real >= 0.0)

    def test_mode_point(self):
        """Scalar wavenumbers become one-component vectors."""
        mode = ModePoint(k=0.0, xi=2.0)
        assert mode.xi == (2.0,)
        assert mode.is_steady
        assert abs(mode.root - 2.0) < 1e-12

    def test_parabolic_scale(self):
        """<eta, xi> = (eta^2 + |xi|^{4m})^{1/(4m)}."""
        assert float(ParabolicScale()(4.0, 0.0)) == pytest.approx(2.0)
        assert float(ParabolicScale(m=2)(0.0, 3.0)) == pytest.approx(3.0)

    def test_bump_support(self):
        """The bump vanishes outside the open annulus 1/2 < |y| < 2."""
        bump = BumpSpec()
        assert float(bump(0.5)) == 0.0
        assert float(bump(2.0)) == 0.0
        assert float(bump(-1.0)) > 0.0


class TestMultipliers:
    def test_M_is_bounded_by_one(self, rng):
        """|M| <= 1 everywhere it is defined."""
        eta, xi = _samples(rng)
        assert np.max(np.abs(symbol_M(eta, xi))) <= 1.0 + 1e-12

    def test_M_excludes_zero_wavenumber(self):
        """M and M1 are undefined at xi = 0."""
        with pytest.raises(SymbolDomainError):
            symbol_M(1.0, 0.0)
        with pytest.raises(SymbolDomainError):
            symbol_M1(1.0, np.zeros(2))

    def test_M2_excludes_origin(self):
        """M2 is undefined at (eta, xi) = (0, 0) only."""
        with pytest.raises(SymbolDomainError):
            symbol_M2(0.0, 0.0)
        assert abs(complex(symbol_M2(4.0, 0.0))) == pytest.approx(1.0)

    def test_M1_is_vector_valued(self, rng):
        """M1 carries one component per tangential direction."""
        eta, xi = _samples(rng, count=5, dims=2)
        assert symbol_M1(eta, xi).shape == (5, 2)

    def test_heat_profile(self):
        """(z x_n)^power e^{-z x_n} with z = |xi| for the tangential kind."""
        assert complex(symbol_heat_profile(1.0, 2.0, 0.0)) == 1.0
        assert complex(symbol_heat_profile(1.0, 2.0, 0.0, power=1)) == 0.0
        value = complex(symbol_heat_profile(1.0, 2.0, 1.0, kind="tangential"))
        assert value == pytest.approx(np.exp(-2.0))
        with pytest.raises(ValueError):
            symbol_heat_profile(1.0, 2.0, 1.0, power=-1)
        with pytest.raises(ValueError):
            symbol_heat_profile(1.0, 2.0, -1.0)


class TestPartition:
    def test_partition_of_unity(self, rng):
        """The shells sum to one away from the origin."""
        eta, xi = _samples(rng, dims=2)
        scale, bump = ParabolicScale(), BumpSpec()
        total = sum(partition_phi(scale, bump, l, eta, xi) for l in range(-16, 17))
        assert np.max(np.abs(total - 1.0)) < 1e-12

    def test_support_and_sign(self, rng):
        """phi_l is nonnegative and vanishes off 2^{l-1} <= rho <= 2^{l+1}."""
        rho = np.exp2(rng.uniform(-6.0, 6.0, 5000))
        for l in range(-4, 5):
            weight = shell_weight(rho, l)
            assert np.all(weight >= 0.0)
            outside = (rho < 2.0 ** (l - 1)) | (rho > 2.0 ** (l + 1))
            assert not np.any(weight[outside])

    def test_origin_has_no_shell(self):
        """rho = 0 belongs to no shell."""
        assert float(shell_weight(0.0, 0)) == 0.0

    def test_shell_range(self):
        """l_max is the first index with 2^{l_max} above the largest length."""
        assert shell_range(np.array([0.0, 3.0])) == (0, 2)
        assert shell_range(np.array([0.0])) == (0, 0)


class TestPressureSymbol:
    def test_split_sums_to_q0(self):
        """q0 = q1 + q2."""
        mode = ModePoint(k=2.0, xi=(1.0, -0.5))
        q1, q2 = q1_q2_split(mode, [1.0 + 0.5j, -0.25j], 0.3 - 0.1j)
        assert q1 + q2 == pytest.approx(q0_symbol(mode, [1.0 + 0.5j, -0.25j], 0.3 - 0.1j))

    def test_tangential_term(self):
        """With h_n = 0 the pressure is -i(|xi| + lambda) (xi/|xi|).h'."""
        mode = ModePoint(k=1.0, xi=(2.0,))
        root = np.sqrt(4.0 + 1.0j)
        assert q0_symbol(mode, [1.0], 0.0) == pytest.approx(-1j * (2.0 + root))

    def test_perturbation_flips_tangential_term(self):
        """The fault injection negates the tangential contribution."""
        mode = ModePoint(k=1.0, xi=(3.0,))
        clean = q0_symbol(mode, [0.7 - 0.2j], 0.0)
        assert q0_symbol(mode, [0.7 - 0.2j], 0.0, perturb=True) == pytest.approx(-clean)

    def test_domain(self):
        """Steady modes, and xi = 0 with normal data, are excluded."""
        with pytest.raises(SymbolDomainError):
            q0_symbol(ModePoint(k=0.0, xi=(1.0,)), [1.0], 0.0)
        with pytest.raises(SymbolDomainError):
            q0_symbol(ModePoint(k=1.0, xi=(0.0,)), [1.0], 1.0)
        with pytest.raises(ValueError):
            q0_symbol(ModePoint(k=1.0, xi=(1.0,)), [1.0, 2.0], 0.0)


class TestMarcinkiewiczAudit:
    def test_constant_symbol(self):
        """A constant has sup 1 on the zeroth mask and no derivative content."""
        report = marcinkiewicz_audit(
            lambda eta, xi: np.ones_like(eta), 2, levels=3, points_per_octave=1
        )
        assert report.per_mask["00"] == 1.0
        assert report.per_mask["11"] == 0.0
        assert report.sup == 1.0
        assert not report.divergent

    def test_growing_symbol_is_divergent(self):
        """A symbol that grows toward the lattice edge is flagged."""
        report = marcinkiewicz_audit(lambda x: x, 1, levels=4, points_per_octave=1, warn=False)
        assert report.divergent

    def test_non_finite_symbol(self):
        """Non-finite values stop the audit."""
        with pytest.raises(SymbolAuditError):
            marcinkiewicz_audit(lambda x: np.full_like(x, np.inf), 1, levels=2)

    def test_boundary_symbols_are_finite(self):
        """M, M1, M2 and the profile symbols audit to finite suprema; |M| <= 1."""
        reports = audit_reports(2, levels=4, points_per_octave=2)
        assert [r.name for r in reports][:3] == ["M", "M1", "M2"]
        assert len(reports) == 7
        assert all(np.isfinite(r.sup) for r in reports)
        assert reports[0].per_mask["00"] <= 1.0 + 1e-12

    def test_refinement_change(self):
        """Relative change of the overall supremum."""

        def report(sup: float, p: int) -> AuditReport:
            return AuditReport(
                name="s",
                dimension=1,
                levels=3,
                points_per_octave=p,
                per_mask={"0": sup, "1": 0.0},
                inner_per_mask={"0": sup, "1": 0.0},
                sup=sup,
                divergent=False,
            )

        assert refinement_change(report(1.0, 2), report(1.04, 4)) == pytest.approx(0.04 / 1.04)
        assert refinement_change(report(0.0, 2), report(0.0, 4)) == 0.0
