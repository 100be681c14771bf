import numpy as np
import pytest
from numpy.testing import assert_array_equal

from hebbiantools.core.box import InvariantBox, invariant_box, symmetric_box
from hebbiantools.core.network import (
    ModelError,
    NetworkSpec,
    ReducedState3,
    SymmetricParams,
    SystemState,
    bidirectional_motif,
    single_synapse_motif,
)


class TestNetworkSpec:
    def test_dimension(self):
        spec = NetworkSpec(n=2, a=[1, 1], edges=[(1, 0), (0, 1)], b=[1, 1], c=[-3, -3])
        assert spec.dimension == 4
        assert spec.n_edges == 2
        assert spec.is_autonomous

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            ({"a": [0, 1]}, "a[0] must be > 0"),
            ({"a": [1, -2]}, "a[1] must be > 0"),
            ({"b": [1, 0]}, "b[1] must be > 0"),
            ({"c": [0, 1]}, "c[0] must be nonzero"),
            ({"edges": [(1, 0), (1, 0)]}, "duplicate edge"),
            ({"edges": [(1, 0), (0, 2)]}, "outside 0..1"),
            ({"a": [1.0, float("nan")]}, "a[1] must be finite"),
            ({"b": [1.0]}, "b must have 2 entries"),
        ],
    )
    def test_validation(self, kwargs, message):
        params = {"n": 2, "a": [1, 1], "edges": [(1, 0), (0, 1)], "b": [1, 1], "c": [1, 1]}
        params.update(kwargs)
        with pytest.raises(ModelError, match=message.replace("[", r"\[").replace("]", r"\]")):
            NetworkSpec(**params)

    def test_arrays_are_read_only(self):
        spec = bidirectional_motif()
        with pytest.raises(ValueError):
            spec.a[0] = 2.0

    def test_dict_round_trip(self):
        spec = bidirectional_motif(a1=0.2, a2=0.4, b1=0.25, b2=0.5, c1=-10.0, c2=-8.0)
        data = spec.to_dict()
        assert data["schema_version"] == 1
        assert data["edges"][0] == {"i": 1, "j": 0, "b": 0.25, "c": -10.0}
        assert NetworkSpec.from_dict(data) == spec

    def test_from_dict_missing_key(self):
        with pytest.raises(ModelError, match="missing or malformed"):
            NetworkSpec.from_dict({"n": 2, "a": [1, 1]})

    def test_dense_weights(self):
        spec = bidirectional_motif()
        assert_array_equal(spec.dense_weights(np.array([3.0, 5.0])), [[0.0, 5.0], [3.0, 0.0]])

    def test_state_labels(self):
        assert bidirectional_motif().state_labels() == ["x_1", "x_2", "w_2_1", "w_1_2"]
        assert single_synapse_motif().state_labels() == ["x_1", "x_2", "w_2_1"]

    def test_edge_index(self):
        spec = bidirectional_motif()
        assert spec.edge_index(0, 1) == 1
        with pytest.raises(ModelError, match="not part of the network"):
            spec.edge_index(0, 0)

    def test_with_learning_rates(self):
        spec = bidirectional_motif(c1=-3.0, c2=-3.0)
        changed = spec.with_learning_rates([1], -9.0)
        assert_array_equal(changed.c, [-3.0, -9.0])
        assert_array_equal(spec.c, [-3.0, -3.0])

    def test_require_autonomous(self):
        spec = bidirectional_motif(u2=0.5)
        assert not spec.is_autonomous
        with pytest.raises(ModelError, match="u\\[1\\]"):
            spec.require_autonomous()


class TestStates:
    def test_system_state_from_vector(self):
        spec = bidirectional_motif()
        state = SystemState.from_vector(spec, [1.0, 2.0, 3.0, 4.0])
        assert_array_equal(state.x, [1.0, 2.0])
        assert state.weight(0, 1) == 4.0
        assert_array_equal(state.as_vector(), [1.0, 2.0, 3.0, 4.0])

    def test_system_state_wrong_length(self):
        with pytest.raises(ModelError, match="expected n \\+ \\|edges\\| = 4"):
            SystemState.from_vector(bidirectional_motif(), [0.0, 0.0, 0.0])

    def test_reduced_state(self):
        state = ReducedState3.from_array([1.0, -2.0, 0.5])
        assert state.x2 == -2.0
        assert_array_equal(state.as_array(), [1.0, -2.0, 0.5])


class TestSymmetricParams:
    def test_detected(self):
        params = SymmetricParams.from_spec(
            bidirectional_motif(a1=0.2, a2=0.4, b1=0.25, b2=0.5, c1=-5.0, c2=-5.0)
        )
        assert params is not None
        assert params.A == pytest.approx(0.1)
        assert params.effective_c == pytest.approx(-50.0)

    def test_not_symmetric(self):
        assert SymmetricParams.from_spec(bidirectional_motif(c1=-3.0, c2=-2.0)) is None
        assert SymmetricParams.from_spec(single_synapse_motif()) is None

    def test_invalid(self):
        with pytest.raises(ModelError):
            SymmetricParams(A=0.0, c=1.0)


class TestInvariantBox:
    def test_motif_bounds(self):
        box = invariant_box(bidirectional_motif(b1=0.5, b2=1.0, c1=2.0, c2=-3.0))
        assert box.w_bound == pytest.approx(6.0)
        assert box.x_bound == pytest.approx(6.0)

    def test_symmetric_box(self):
        box = symmetric_box(-150.0)
        assert box.x_bound == box.w_bound == 150.0
        with pytest.raises(ModelError):
            symmetric_box(0.0)

    def test_fan_in_and_inputs(self):
        spec = NetworkSpec(
            n=3, a=[2, 1, 1], edges=[(0, 1), (0, 2)], b=[1, 1], c=[4, -1], u=[0.5, 0, 0]
        )
        box = invariant_box(spec)
        assert box.w_bound == pytest.approx(4.0)
        assert box.x_bound == pytest.approx((4.0 * 2 + 0.5) / 1.0)

    def test_excursion(self):
        box = InvariantBox(x_bound=1.0, w_bound=2.0)
        assert box.excursion(np.array([0.5, -1.5, 2.0]), n_nodes=2) == pytest.approx(0.5)
        assert box.contains(np.array([1.0, -2.0]), n_nodes=1)
        assert box.inflate(1.5).w_bound == pytest.approx(3.0)
