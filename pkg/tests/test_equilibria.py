import numpy as np
import pytest
from numpy.testing import assert_allclose

from hebbiantools.constants import Certificate, StartStrategy, Stability, SymmetryTag
from hebbiantools.core import dynamics as dyn
from hebbiantools.core.box import invariant_box
from hebbiantools.core.network import ModelError, bidirectional_motif, single_synapse_motif
from hebbiantools.core.systems import NetworkSystem, PlanarSystem, Reduced3System
from hebbiantools.lib.equilibria import (
    EquilibriumError,
    NewtonConfig,
    damped_newton,
    find_equilibria,
    fixed_point_jacobian,
    fixed_point_map_F,
    fixed_point_norm,
    newton_starts,
    search_equilibria,
)
from hebbiantools.lib.integrate import sample_box
from hebbiantools.lib.stability import contraction_certificate, single_synapse_stability
from hebbiantools.lib.symmetric import symmetric_diagonal_root, symmetric_equilibrium
from tests.conftest import finite_difference_jacobian


class TestNewtonConfig:
    def test_default_starts(self):
        cfg = NewtonConfig()
        assert cfg.starts_for(3) == 64
        assert cfg.starts_for(20) == 160
        assert NewtonConfig(n_starts=10).starts_for(20) == 10

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"n_starts": 0}, "n_starts"),
            ({"backtrack_factor": 1.0}, "backtrack_factor"),
            ({"newton_tol": 1e-5, "dedup_tol": 1e-6}, "dedup_tol"),
        ],
    )
    def test_validation(self, kwargs, message):
        with pytest.raises(EquilibriumError, match=message):
            NewtonConfig(**kwargs)


class TestDampedNewton:
    def test_converges_from_nearby(self):
        system = Reduced3System(-3.0)
        target = symmetric_equilibrium(-3.0).as_array()
        outcome = damped_newton(system, target + 0.3, NewtonConfig())
        assert outcome.converged
        assert_allclose(outcome.point, target, atol=1e-10)

    def test_max_iters(self):
        outcome = damped_newton(Reduced3System(-3.0), np.array([2.0, -1.0, 0.5]),
                                NewtonConfig(max_iters=1))
        assert not outcome.converged


class TestStarts:
    @pytest.mark.parametrize("strategy", list(StartStrategy))
    def test_inside_inflated_box(self, strategy):
        system = Reduced3System(-10.0)
        cfg = NewtonConfig(n_starts=50, start_strategy=strategy)
        starts = newton_starts(system, cfg)
        assert starts.shape == (50 + 2 * 50 + 1 + 8, 3)
        assert np.all(np.abs(starts) <= 12.0 + 1e-12)
        assert_allclose(starts[150], 0.0)

    def test_active_layers_lie_on_the_weight_nullcline(self):
        system = Reduced3System(-10.0)
        starts = newton_starts(system, NewtonConfig(n_starts=50))
        narrow, wide = starts[50:100], starts[100:150]
        assert np.all(np.abs(narrow[:, :2]) <= 3.0 * 1.2 + 1e-12)
        assert np.all(np.abs(wide[:, :2]) <= 8.0 * 1.2 + 1e-12)
        for start in np.vstack([narrow, wide]):
            assert_allclose(start[2:], system.weight_nullcline(start[:2]))

    def test_no_active_layer_inside_a_small_box(self):
        starts = newton_starts(Reduced3System(-3.0), NewtonConfig(n_starts=50))
        assert starts.shape == (50 + 1 + 8, 3)

    def test_network_nullcline(self):
        spec = bidirectional_motif(a1=0.2, a2=0.4, b1=0.25, b2=0.5, c1=-40.0, c2=-32.0)
        system = NetworkSystem(spec)
        x = np.array([-2.5, -0.7])
        w = system.weight_nullcline(x)
        assert_allclose(system.field(np.concatenate([x, w]))[2:], 0.0, atol=1e-14)

    def test_deterministic(self):
        system = Reduced3System(-10.0)
        first = newton_starts(system, NewtonConfig(seed=3))
        second = newton_starts(system, NewtonConfig(seed=3))
        assert_allclose(first, second)

    def test_warm_starts_only(self):
        system = Reduced3System(-3.0)
        target = symmetric_equilibrium(-3.0).as_array()
        search = search_equilibria(
            system, extra_starts=np.array([target + 0.1]), sampled=False
        )
        assert search.n_starts == 1
        assert search.count == 1
        with pytest.raises(EquilibriumError, match="no starting points"):
            search_equilibria(system, sampled=False)


class TestReducedSystem:
    @pytest.mark.parametrize("c", [-3.0, 1.0])
    def test_single_equilibrium(self, c):
        records = find_equilibria(Reduced3System(c))
        assert len(records) == 1
        record = records[0]
        assert record.stability == Stability.STABLE
        assert record.symmetry_tag == SymmetryTag.ON_PLANE_L
        assert record.point[0] == pytest.approx(symmetric_diagonal_root(c), abs=1e-9)

    def test_strong_inhibition(self, newton_cfg):
        search = search_equilibria(Reduced3System(-150.0), newton_cfg)
        assert search.count == 3
        tags = [record.symmetry_tag for record in search.records]
        assert tags.count(SymmetryTag.ON_PLANE_L) == 1
        for record in search.records:
            expected = (
                Stability.UNSTABLE
                if record.symmetry_tag == SymmetryTag.ON_PLANE_L
                else Stability.STABLE
            )
            assert record.stability == expected
            assert record.residual < 1e-11

    def test_conjugate_equilibria_share_spectra(self, newton_cfg):
        records = find_equilibria(Reduced3System(-150.0), newton_cfg)
        off_plane = [r for r in records if r.symmetry_tag == SymmetryTag.OFF_PLANE]
        assert len(off_plane) == 2
        first, second = off_plane
        assert_allclose(dyn.apply_symmetry_s(first.point).as_array(), second.point, atol=1e-8)
        assert_allclose(
            np.sort_complex(first.eigenvalues), np.sort_complex(second.eigenvalues), atol=1e-8
        )

    def test_records_are_sorted(self, newton_cfg):
        records = find_equilibria(Reduced3System(-150.0), newton_cfg)
        first_coordinates = [record.point[0] for record in records]
        assert first_coordinates == sorted(first_coordinates)

    def test_planar_system(self):
        records = find_equilibria(PlanarSystem(-3.0))
        assert len(records) == 1
        assert records[0].point[0] == pytest.approx(symmetric_diagonal_root(-3.0), abs=1e-9)

    def test_to_dict(self):
        search = search_equilibria(Reduced3System(-3.0))
        data = search.to_dict()
        assert data["count"] == 1
        assert data["box"] == {"x_bound": 3.0, "w_bound": 3.0}
        record = data["equilibria"][0]
        assert set(record["point"]) == {"x_1", "x_2", "w"}
        assert record["stability"] == "stable"
        assert record["symmetry_tag"] == "on_plane_L"


class TestNetworks:
    def test_single_synapse_motif(self):
        records = find_equilibria(single_synapse_motif())
        assert len(records) == 1
        report = single_synapse_stability(1.0, 1.0, 1.0, 1.0)
        assert_allclose(records[0].point, report.equilibrium, atol=1e-9)

    def test_equilibria_lie_in_the_box(self, rng):
        for _ in range(50):
            a1, a2, b1, b2 = rng.uniform(0.2, 2.0, size=4)
            c1, c2 = rng.uniform(-10.0, 10.0, size=2)
            spec = bidirectional_motif(a1=a1, a2=a2, b1=b1, b2=b2, c1=c1, c2=c2)
            box = invariant_box(spec)
            records = find_equilibria(spec)
            assert records
            for record in records:
                assert box.contains(record.point, n_nodes=2, slack=1e-8)

    def test_contraction_certificate_is_sound(self, rng):
        certified = 0
        for _ in range(500):
            if certified == 10:
                break
            a1, a2 = rng.uniform(1.05, 5.0, size=2)
            b1, b2 = rng.uniform(0.5, 5.0, size=2)
            c1, c2 = rng.choice([-1.0, 1.0], size=2) * rng.uniform(0.01, 3.0, size=2)
            spec = bidirectional_motif(a1=a1, a2=a2, b1=b1, b2=b2, c1=c1, c2=c2)
            certificate = contraction_certificate(spec)
            if certificate.verdict != Certificate.UNIQUE_GUARANTEED:
                continue
            certified += 1
            records = find_equilibria(spec, NewtonConfig(n_starts=128))
            assert len(records) == 1
            box = invariant_box(spec)
            for sample in sample_box(box, 2, 2, 100, rng):
                assert fixed_point_norm(spec, sample) <= certificate.norm_bound + 1e-12
            if certificate.norm_bound < 0.9:
                vector = box.upper(2, 2)
                for _ in range(400):
                    vector = fixed_point_map_F(spec, vector)
                assert_allclose(vector, records[0].point, atol=1e-9)
        assert certified == 10

    def test_sign_quadrant(self):
        records = find_equilibria(bidirectional_motif(c1=4.0, c2=-4.0))
        for record in records:
            x1, x2, w1, w2 = record.point
            assert x1 < 0.0 < x2
            assert w2 < 0.0 < w1

    def test_inputs_are_rejected(self):
        with pytest.raises(ModelError, match="require u = 0"):
            search_equilibria(bidirectional_motif(u1=0.1))

    def test_parallel_search_matches_serial(self):
        system = NetworkSystem(bidirectional_motif(c1=-3.0, c2=-2.0))
        cfg = NewtonConfig(n_starts=32)
        serial = search_equilibria(system, cfg, jobs=1)
        parallel = search_equilibria(system, cfg, jobs=2)
        assert serial.count == parallel.count
        for left, right in zip(serial.records, parallel.records):
            assert_allclose(left.point, right.point)


class TestFixedPointMap:
    def test_maps_box_into_box(self, rng):
        spec = bidirectional_motif(a1=0.7, a2=1.3, b1=0.9, b2=1.1, c1=-3.0, c2=2.0)
        box = invariant_box(spec)
        for point in sample_box(box, 2, 2, 200, rng):
            assert box.contains(fixed_point_map_F(spec, point), n_nodes=2, slack=1e-12)

    def test_equilibria_are_fixed_points(self):
        spec = bidirectional_motif(a1=1.5, a2=2.0, c1=-3.0, c2=-2.0)
        for record in find_equilibria(spec):
            assert_allclose(fixed_point_map_F(spec, record.point), record.point, atol=1e-10)

    def test_jacobian(self, rng):
        spec = bidirectional_motif(a1=1.5, a2=2.0, c1=-3.0, c2=-2.0)
        point = rng.uniform(-2.0, 2.0, size=4)

        class _Map:
            def field(self, vector):
                return fixed_point_map_F(spec, vector)

        assert_allclose(
            fixed_point_jacobian(spec, point),
            finite_difference_jacobian(_Map(), point),
            atol=1e-7,
        )

    def test_norm(self):
        spec = bidirectional_motif(a1=2.0, a2=2.0)
        jac = fixed_point_jacobian(spec, np.zeros(4))
        assert fixed_point_norm(spec, np.zeros(4)) == pytest.approx(np.abs(jac).sum(axis=0).max())

    def test_requires_motif(self):
        with pytest.raises(EquilibriumError, match="bidirectional motif"):
            fixed_point_map_F(single_synapse_motif(), np.zeros(3))
