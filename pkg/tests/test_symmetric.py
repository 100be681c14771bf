import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hebbiantools.core import dynamics as dyn
from hebbiantools.lib.symmetric import (
    DomainError,
    SymmetricCaseError,
    admissible_interval,
    beta_c,
    count_f_roots,
    critical_c0,
    critical_eigenvector,
    critical_xhat0,
    equilibria_from_f_roots,
    f_xi,
    lambda1_of_xhat,
    lambert_w0,
    planar_boundary_check,
    reduced3_characteristic_polynomial,
    symmetric_diagonal_root,
    symmetric_equilibrium,
    symmetric_equilibrium_jacobian,
)


class TestDiagonalRoot:
    def test_hebbian(self):
        x_hat = symmetric_diagonal_root(1.0)
        assert x_hat == pytest.approx(0.157, abs=1e-3)
        assert abs(x_hat - dyn.sigmoid(x_hat) ** 3) < 1e-13

    @pytest.mark.parametrize("c", [-200.0, -123.7, -3.0, 0.5, 50.0])
    def test_residual_and_sign(self, c):
        x_hat = symmetric_diagonal_root(c)
        assert abs(x_hat - c * dyn.sigmoid(x_hat) ** 3) < 1e-13 * max(1.0, abs(c))
        assert np.sign(x_hat) == np.sign(c)

    def test_zero(self):
        assert symmetric_diagonal_root(0.0) == 0.0

    def test_equilibrium_is_a_zero_of_the_reduced_field(self):
        state = symmetric_equilibrium(-50.0)
        assert state.x1 == state.x2
        assert np.max(np.abs(dyn.reduced3_field(-50.0, state))) < 1e-10

    def test_planar_residual(self):
        x_hat = symmetric_diagonal_root(1.0)
        w = dyn.sigmoid(x_hat) ** 2
        assert np.max(np.abs(dyn.reduced_planar_field(1.0, x_hat, w))) < 1e-10


class TestClosedFormJacobian:
    @pytest.mark.parametrize("c", [-150.0, -3.0, 1.0])
    def test_matches_analytic_jacobian(self, c):
        state = symmetric_equilibrium(c)
        assert_allclose(
            symmetric_equilibrium_jacobian(c), dyn.reduced3_jacobian(c, state), atol=1e-12
        )

    @pytest.mark.parametrize("c", [-150.0, -50.0, 1.0])
    def test_characteristic_polynomial(self, c):
        roots = np.sort_complex(np.roots(reduced3_characteristic_polynomial(c)))
        eigenvalues = np.sort_complex(np.linalg.eigvals(symmetric_equilibrium_jacobian(c)))
        assert_allclose(roots, eigenvalues, atol=1e-9)


class TestBeta:
    def test_positive(self):
        beta = beta_c(2.0)
        assert beta == pytest.approx(1.6879, abs=1e-3)
        assert abs(beta * (1.0 + math.exp(-beta)) - 2.0) < 1e-12

    def test_negative(self):
        beta = beta_c(-2.0)
        assert beta == pytest.approx(-0.6749, abs=1e-3)
        assert abs(beta * (1.0 + math.exp(-beta)) + 2.0) < 1e-12

    def test_defining_property(self, rng):
        for c in rng.uniform(-300.0, 300.0, size=100):
            beta = beta_c(c)
            assert abs(beta * (1.0 + math.exp(-beta)) - c) < 1e-12 * max(1.0, abs(c))

    def test_zero(self):
        with pytest.raises(DomainError, match="beta undefined"):
            beta_c(0.0)

    def test_admissible_interval(self):
        assert admissible_interval(2.0) == (0.0, beta_c(2.0))
        assert admissible_interval(-2.0) == (beta_c(-2.0), 0.0)


class TestRootFunction:
    def test_endpoint_limits(self):
        beta = beta_c(2.0)
        assert f_xi(2.0, 1e-12) < -10.0
        assert f_xi(2.0, beta - 1e-9) > 10.0

    def test_outside_interval(self):
        with pytest.raises(DomainError, match="outside the admissible interval"):
            f_xi(2.0, -0.5)
        with pytest.raises(DomainError):
            f_xi(-150.0, 0.0)

    @pytest.mark.parametrize("c, expected", [(2.0, 1), (-100.0, 1), (-150.0, 3), (-200.0, 3)])
    def test_root_counts(self, c, expected):
        roots = count_f_roots(c)
        assert len(roots) == expected
        assert roots == sorted(roots)

    def test_count_changes_across_critical_value(self):
        c0 = critical_c0()
        assert len(count_f_roots(c0 + 0.5)) == 1
        assert len(count_f_roots(c0 - 0.5)) == 3

    def test_grid_too_coarse(self):
        with pytest.raises(SymmetricCaseError, match="grid_points"):
            count_f_roots(-150.0, grid_points=10)

    def test_roots_map_to_equilibria(self):
        states = equilibria_from_f_roots(-150.0)
        assert len(states) == 3
        for state in states:
            assert np.max(np.abs(dyn.reduced3_field(-150.0, state))) < 1e-8
        on_plane = [state for state in states if abs(state.x1 - state.x2) < 1e-6]
        assert len(on_plane) == 1
        assert on_plane[0].x1 == pytest.approx(symmetric_diagonal_root(-150.0), abs=1e-6)


class TestLambertW:
    @pytest.mark.parametrize(
        "y, expected",
        [(0.0, 0.0), (math.e, 1.0), (math.exp(-1.0), 0.2784645428), (-math.exp(-1.0), -1.0)],
    )
    def test_values(self, y, expected):
        assert lambert_w0(y) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("y", [-0.3, -0.1, 1e-8, 0.5, 2.0, 10.0, 100.0])
    def test_residual(self, y):
        w = lambert_w0(y)
        assert abs(w * math.exp(w) - y) < 1e-14 * max(1.0, abs(y))
        assert w >= -1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.5)
        with pytest.raises(DomainError):
            lambert_w0(float("nan"))


class TestCriticalValue:
    def test_c0(self):
        assert critical_c0() == pytest.approx(-123.7215, abs=1e-4)

    def test_x_hat0(self):
        x0 = critical_xhat0()
        assert x0 == pytest.approx(-1.278464542, abs=1e-8)
        assert abs(x0 * (dyn.sigmoid(x0) - 1.0) - 1.0) < 1e-12

    def test_consistency(self):
        assert symmetric_diagonal_root(critical_c0()) == pytest.approx(critical_xhat0(), abs=1e-9)
        assert abs(lambda1_of_xhat(critical_xhat0())) < 1e-12

    def test_eigenvector_is_transverse(self):
        vector = critical_eigenvector()
        assert_allclose(vector, [-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.0], atol=1e-8)


class TestPlanarBoundary:
    @pytest.mark.parametrize("c", [-3.9, -1.0, 2.0, 7.5])
    def test_inward_with_negative_divergence(self, c):
        report = planar_boundary_check(c)
        assert report.inward
        assert report.divergence_negative
        assert report.max_divergence <= -2.0 + abs(c) / 4.0 + 1e-12

    def test_divergence_changes_sign_for_strong_coupling(self):
        report = planar_boundary_check(-20.0)
        assert report.inward
        assert not report.divergence_negative

    def test_domain(self):
        with pytest.raises(DomainError):
            planar_boundary_check(0.0)
