import logging
from types import SimpleNamespace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hebbiantools import constants as const
from hebbiantools.constants import Stability
from hebbiantools.core.network import bidirectional_motif
from hebbiantools.core.systems import NetworkSystem, Reduced3System
from hebbiantools.lib.bifurcation import (
    BifurcationError,
    DiagramTable,
    SweepPoint,
    SweepResult,
    SweepSpec,
    Transition,
    count_windows,
    export_diagram,
    parse_diagram,
    refine_transition,
    sweep,
    sweep_grid,
)
from hebbiantools.lib.equilibria import NewtonConfig
from hebbiantools.lib.netgen import asymmetric_motif_preset, symmetric_motif_preset
from hebbiantools.lib.symmetric import critical_c0


class TestSweepGrid:
    def test_uniform(self):
        assert_allclose(sweep_grid(-4.0, -2.0, 5), [-4.0, -3.5, -3.0, -2.5, -2.0])

    @pytest.mark.parametrize("c_lo, c_hi", [(-200.0, -3.0), (-3.0, -200.0)])
    def test_focused_grid_is_monotone(self, c_lo, c_hi):
        grid = sweep_grid(c_lo, c_hi, 64, foci=[critical_c0()])
        assert grid[0] == c_lo and grid[-1] == c_hi
        steps = np.diff(grid)
        assert np.all(steps > 0) if c_lo < c_hi else np.all(steps < 0)

    def test_denser_near_focus(self):
        grid = sweep_grid(-200.0, -3.0, 64, foci=[-100.0])
        steps = np.diff(grid)
        near = steps[np.argmin(np.abs(grid[:-1] + 100.0))]
        assert near < steps[0] and near < steps[-1]

    @pytest.mark.parametrize("c_lo, c_hi, n", [(-3.0, -3.0, 10), (-4.0, -3.0, 1)])
    def test_errors(self, c_lo, c_hi, n):
        with pytest.raises(BifurcationError, match="n >= 2"):
            sweep_grid(c_lo, c_hi, n)


class TestSweepSpec:
    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"c_values": [-3.0]}, "at least 2"),
            ({"c_values": [-3.0, -2.0, -2.5]}, "strictly monotone"),
            ({"targets": []}, "must not be empty"),
            ({"targets": [0, 2]}, r"targets\[1\] = 2 is not an edge index"),
            ({"ratios": [1.0]}, "ratios must have 2 entries"),
            ({"projection": 4}, "projection must be in 0..3"),
            ({"refine_tol": 0.0}, "refine_tol must be > 0"),
        ],
    )
    def test_validation(self, kwargs, message):
        arguments = {"system": bidirectional_motif(c1=-3.0, c2=-3.0), "c_values": [-3.0, -2.0]}
        arguments.update(kwargs)
        with pytest.raises(BifurcationError, match=message):
            SweepSpec(**arguments)

    def test_seed_overrides_newton_seed(self):
        spec = SweepSpec(Reduced3System(-3.0), [-3.0, -2.0], seed=7)
        assert spec.newton.seed == 7

    def test_system_at(self):
        spec = SweepSpec(
            NetworkSystem(bidirectional_motif(c1=-3.0, c2=-3.0)), [-5.0, -4.0], ratios=[1.0, 0.5]
        )
        assert_allclose(spec.system_at(-4.0).spec.c, [-4.0, -2.0])
        with pytest.raises(BifurcationError, match="cannot set learning rate"):
            spec.system_at(0.0)

    def test_inputs_are_rejected(self):
        spec = SweepSpec(bidirectional_motif(u1=0.1), [-3.0, -2.0])
        with pytest.raises(BifurcationError, match="require u = 0"):
            sweep(spec)


class TestSweep:
    def test_weak_coupling_has_a_single_branch(self):
        spec = SweepSpec(Reduced3System(-3.0), [-5.0, -4.0, -3.0], newton=NewtonConfig(n_starts=64))
        result = sweep(spec)
        assert result.counts == [1, 1, 1]
        assert result.transitions == []
        assert len(result.branches) == 1
        assert result.branches[0].c_values == [-5.0, -4.0, -3.0]
        assert all(value == Stability.STABLE for value in result.branches[0].stability)

    def test_diagram_round_trip(self):
        spec = SweepSpec(Reduced3System(-3.0), [-5.0, -4.0, -3.0], newton=NewtonConfig(n_starts=64))
        result = sweep(spec)
        text = export_diagram(result)
        assert text.splitlines()[0] == const.DIAGRAM_HEADER
        assert text.splitlines()[1] == "c,branch_id,x_1,stability"
        parsed = parse_diagram(text)
        expected = DiagramTable.from_result(result)
        assert parsed.label == expected.label
        assert_allclose(parsed.c, expected.c)
        assert_allclose(parsed.value, expected.value)
        assert parsed.branch_id.tolist() == expected.branch_id.tolist()
        assert parsed.stability == expected.stability

    def test_sweep_direction_does_not_change_the_equilibria(self, newton_cfg):
        grid = [-160.0, -140.0, -110.0, -90.0]
        increasing = sweep(SweepSpec(Reduced3System(-3.0), grid, newton=newton_cfg))
        decreasing = sweep(SweepSpec(Reduced3System(-3.0), grid[::-1], newton=newton_cfg))
        assert increasing.counts == [3, 3, 1, 1]
        assert decreasing.counts == increasing.counts[::-1]
        for left, right in zip(increasing.points, reversed(decreasing.points)):
            assert left.c == right.c
            assert_allclose(
                [record.point for record in left.records],
                [record.point for record in right.records],
                atol=1e-8,
            )

    def test_wide_transition_bracket_warns(self, newton_cfg, caplog):
        spec = SweepSpec(Reduced3System(-3.0), [-160.0, -90.0], newton=newton_cfg)
        with caplog.at_level(logging.WARNING, logger="hebbiantools.lib.bifurcation"):
            result = sweep(spec)
        assert result.counts == [3, 1]
        assert "changes from 3 to 1" in caplog.text
        assert "refine it on [-160, -90]" in caplog.text

        caplog.clear()
        spec = SweepSpec(Reduced3System(-3.0), [-160.0, -90.0], newton=newton_cfg, refine_tol=100.0)
        with caplog.at_level(logging.WARNING, logger="hebbiantools.lib.bifurcation"):
            sweep(spec)
        assert "changes from" not in caplog.text

    @pytest.mark.slow
    def test_pitchfork_of_the_symmetric_motif(self, newton_cfg):
        c0 = critical_c0()
        spec = SweepSpec(Reduced3System(-3.0), sweep_grid(-150.0, -3.0, 16), newton=newton_cfg)
        result = sweep(spec)
        for c, count in zip(result.c_values, result.counts):
            assert count == (3 if c < c0 else 1)
        assert len(result.transitions) == 1
        transition = result.transitions[0]
        assert transition.c_lo < c0 < transition.c_hi
        assert (transition.count_before, transition.count_after) == (3, 1)
        assert count_windows(result, 3) == [(result.c_values[0], transition.c_lo)]

    @pytest.mark.slow
    def test_refined_transition(self, newton_cfg):
        spec = SweepSpec(Reduced3System(-3.0), [-130.0, -120.0], newton=newton_cfg)
        result = sweep(spec)
        assert result.counts == [3, 1]
        estimate = refine_transition(result, 0, tol=1e-4)
        assert estimate == pytest.approx(critical_c0(), abs=1e-3)


class TestMotifSweeps:
    def test_symmetric_motif_goes_from_one_branch_to_three(self):
        preset = symmetric_motif_preset()
        spec = SweepSpec(
            NetworkSystem(preset.spec),
            [-160.0, -140.0, -110.0, -90.0],
            targets=preset.swept_edges,
            ratios=preset.ratios,
            newton=NewtonConfig(n_starts=128),
        )
        result = sweep(spec)
        assert result.counts == [3, 3, 1, 1]
        assert [(t.count_before, t.count_after) for t in result.transitions] == [(3, 1)]
        assert result.transitions[0].c_lo < critical_c0() < result.transitions[0].c_hi
        stability = sorted(record.stability.value for record in result.points[0].records)
        assert stability == ["stable", "stable", "unstable"]
        assert result.points[-1].records[0].stability == Stability.STABLE

    def test_asymmetric_motif_fold_is_the_same_on_every_seed(self):
        preset = asymmetric_motif_preset()
        grid = [-80.0, -60.0, -45.0, -30.0, -20.0, -10.0]
        for seed in range(5):
            spec = SweepSpec(
                NetworkSystem(preset.spec),
                grid,
                targets=preset.swept_edges,
                ratios=preset.ratios,
                newton=NewtonConfig(n_starts=128),
                seed=seed,
            )
            result = sweep(spec)
            assert result.counts == [3, 3, 3, 1, 1, 1], seed
            assert count_windows(result, 2) == []
            transition = result.transitions[0]
            assert (transition.c_lo, transition.c_hi) == (-45.0, -30.0)
            stability = sorted(record.stability.value for record in result.points[2].records)
            assert stability == ["stable", "stable", "unstable"]
            weak_branch = result.branches[result.points[-1].branch_ids[0]]
            assert all(value == Stability.STABLE for value in weak_branch.stability)


class TestRefineTransition:
    def test_warm_starts_come_from_the_current_bracket(self, monkeypatch):
        previous_sizes = []

        def solve_at(spec, c, previous, rng, jobs, known=None, sampled=True):
            previous_sizes.append(len(previous))
            count = 3 if c < -9.5 else 1
            return SimpleNamespace(
                count=count, records=[SimpleNamespace(point=np.full(3, c))] * count
            )

        monkeypatch.setattr("hebbiantools.lib.bifurcation._solve_at", solve_at)
        points = [
            SweepPoint(-10.0, [SimpleNamespace(point=np.zeros(3))] * 3, [0, 1, 2]),
            SweepPoint(-9.0, [SimpleNamespace(point=np.ones(3))], [0]),
        ]
        result = SweepResult(
            SweepSpec(Reduced3System(-3.0), [-10.0, -9.0]),
            points,
            [],
            [Transition(-10.0, -9.0, 3, 1)],
        )
        assert refine_transition(result, 0, tol=1e-3) == pytest.approx(-9.5, abs=1e-3)
        assert previous_sizes == [4] * 10


class TestCountWindows:
    @staticmethod
    def _result(counts: list[int]) -> SweepResult:
        system = Reduced3System(-3.0)
        c_values = [-float(10 - index) for index in range(len(counts))]
        points = [
            SweepPoint(c=c, records=[None] * count, branch_ids=list(range(count)))
            for c, count in zip(c_values, counts)
        ]
        return SweepResult(SweepSpec(system, c_values), points, [], [])

    def test_windows(self):
        result = self._result([1, 3, 3, 1, 3, 5])
        assert count_windows(result, 3) == [(-9.0, -8.0), (-6.0, -6.0)]
        assert count_windows(result, 1) == [(-10.0, -10.0), (-7.0, -7.0)]
        assert count_windows(result, 2) == []

    def test_refine_needs_a_transition(self):
        with pytest.raises(BifurcationError, match="no transition #0"):
            refine_transition(self._result([1, 1]), 0)


class TestParseDiagram:
    def test_missing_tag(self):
        with pytest.raises(BifurcationError, match="format tag"):
            parse_diagram("c,branch_id,x_1,stability\n")

    def test_bad_header(self):
        with pytest.raises(BifurcationError, match="column header"):
            parse_diagram(const.DIAGRAM_HEADER + "\nc,x_1\n")
