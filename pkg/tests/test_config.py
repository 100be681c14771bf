import json

import numpy as np
import pytest

from hebbiantools.config import (
    ConfigError,
    RunConfig,
    SystemKind,
    apply_overrides,
    build_system,
    initial_state,
    load_run_config,
)
from hebbiantools.constants import Method, StartStrategy, TopologyKind
from hebbiantools.core.network import bidirectional_motif
from hebbiantools.core.systems import NetworkSystem, PlanarSystem, Reduced3System


class TestOverrides:
    def test_nested(self):
        raw = apply_overrides({}, ["newton.n_starts=512", "system.kind=planar", "seed=7"])
        assert raw == {"newton": {"n_starts": 512}, "system": {"kind": "planar"}, "seed": 7}

    def test_json_values(self):
        raw = apply_overrides({}, ["sweep.foci=[-123.7]", "sweep.refine=false", "jobs= 2 "])
        assert raw == {"sweep": {"foci": [-123.7], "refine": False}, "jobs": 2}

    @pytest.mark.parametrize("override", ["seed", "=3", "system..c=1"])
    def test_malformed(self, override):
        with pytest.raises(ConfigError, match="malformed override"):
            apply_overrides({}, [override])

    def test_not_a_section(self):
        with pytest.raises(ConfigError, match="is not a section"):
            apply_overrides({"seed": 1}, ["seed.value=2"])


class TestLoadRunConfig:
    def test_defaults(self):
        cfg = load_run_config()
        assert cfg.system.kind == SystemKind.REDUCED3
        assert cfg.system.c == -3.0
        assert cfg.integration.method == Method.RK45_ADAPTIVE
        assert cfg.newton.start_strategy == StartStrategy.SOBOL

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 3, "system": {"kind": "reduced3", "c": -150.0}}))
        cfg = load_run_config(path, ["system.c=-100"], jobs=4)
        assert cfg.seed == 3
        assert cfg.jobs == 4
        assert cfg.system.c == -100.0
        assert load_run_config(path, seed=9).seed == 9

    def test_unknown_field(self):
        with pytest.raises(ConfigError, match="sweep.bogus"):
            load_run_config(overrides=["sweep.bogus=1"])

    @pytest.mark.parametrize(
        "override, message",
        [
            ("system.c=0", "system.c must be nonzero"),
            ("system.kind=network", "system.spec is required"),
            ("sweep.c_hi=-150", "must differ"),
            ("integration.dt=0", "integration.dt"),
            ("schema_version=2", "schema_version"),
            ("system.kind=hopfield", "system.kind"),
        ],
    )
    def test_invalid(self, override, message):
        with pytest.raises(ConfigError, match=message):
            load_run_config(overrides=[override])

    def test_unreadable(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="cannot read config"):
            load_run_config(path)
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_run_config(path)

    def test_digest_ignores_key_order(self, tmp_path):
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        first.write_text(json.dumps({"seed": 5, "system": {"kind": "planar", "c": -2.0}}))
        second.write_text(json.dumps({"system": {"c": -2.0, "kind": "planar"}, "seed": 5}))
        assert load_run_config(first).digest == load_run_config(second).digest
        assert load_run_config(first).digest != load_run_config(first, seed=6).digest


class TestLibraryConfigs:
    def test_newton_config_uses_run_seed(self):
        cfg = load_run_config(overrides=["newton.n_starts=128"], seed=11)
        newton = cfg.newton_config()
        assert newton.seed == 11
        assert newton.n_starts == 128

    def test_newton_config_error(self):
        cfg = load_run_config(overrides=["newton.newton_tol=1e-3"])
        with pytest.raises(ConfigError, match="newton: dedup_tol"):
            cfg.newton_config()

    def test_integration_config(self):
        cfg = load_run_config(overrides=["integration.method=rk4-fixed", "integration.dt=0.05"])
        integration = cfg.integration_config()
        assert integration.method == Method.RK4_FIXED
        assert integration.dt == 0.05

    def test_topology_config(self):
        cfg = load_run_config(overrides=["system.kind=interconnected", "topology.k=4"], seed=2)
        topology = cfg.topology_config()
        assert topology.kind == TopologyKind.INTERCONNECTED
        assert topology.k == 4
        assert topology.seed == 2

    def test_topology_config_error(self):
        cfg = load_run_config(overrides=["topology.c_range=[-0.05, 0.05]"])
        with pytest.raises(ConfigError, match="topology: c_range"):
            cfg.topology_config()


class TestBuildSystem:
    def test_reduced(self):
        system, generated = build_system(load_run_config(overrides=["system.c=-150"]))
        assert isinstance(system, Reduced3System)
        assert system.c == -150.0
        assert generated is None
        system, _ = build_system(load_run_config(overrides=["system.kind=planar"]))
        assert isinstance(system, PlanarSystem)

    def test_motifs(self):
        cfg = load_run_config(
            overrides=[
                "system.kind=bidirectional_motif",
                "system.params.c1=-4",
                "system.params.a2=2",
            ]
        )
        system, _ = build_system(cfg)
        assert isinstance(system, NetworkSystem)
        assert system.spec.c[0] == -4.0
        assert system.spec.a[1] == 2.0
        system, _ = build_system(load_run_config(overrides=["system.kind=single_synapse_motif"]))
        assert system.dimension == 3

    def test_network_spec(self):
        spec = bidirectional_motif(c1=-2.0, c2=5.0)
        cfg = RunConfig.model_validate({"system": {"kind": "network", "spec": spec.to_dict()}})
        system, _ = build_system(cfg)
        assert system.spec.to_dict() == spec.to_dict()

    def test_presets(self):
        system, generated = build_system(
            load_run_config(overrides=["system.kind=asymmetric_motif", "system.ratio=0.5"])
        )
        assert generated.ratios == [1.0, 0.5]
        assert system.spec.c.tolist() == [-3.0, -1.5]
        system, generated = build_system(load_run_config(overrides=["system.kind=interconnected"]))
        assert system.dimension == 20
        assert generated.swept_edges == [12, 13]

    def test_random_network_follows_seed(self):
        first, _ = build_system(load_run_config(overrides=["system.kind=random_mixed"], seed=4))
        second, _ = build_system(load_run_config(overrides=["system.kind=random_mixed"], seed=4))
        assert first.spec.to_dict() == second.spec.to_dict()

    @pytest.mark.parametrize(
        "overrides, message",
        [
            (["system.kind=bidirectional_motif", "system.params.a1=0"], r"a\[0\] must be > 0"),
            (["system.kind=bidirectional_motif", "system.params.bogus=1"], "system.params"),
            (["system.kind=network", 'system.spec={"n": 2}'], "invalid network specification"),
        ],
    )
    def test_invalid_parameters(self, overrides, message):
        with pytest.raises(ConfigError, match=message):
            build_system(load_run_config(overrides=overrides))


class TestInitialState:
    def test_explicit(self):
        cfg = load_run_config(overrides=["initial_state.values=[1, 2, 3]"])
        system, _ = build_system(cfg)
        np.testing.assert_array_equal(initial_state(cfg, system), [1.0, 2.0, 3.0])

    def test_wrong_length(self):
        cfg = load_run_config(overrides=["initial_state.values=[1, 2]"])
        system, _ = build_system(cfg)
        with pytest.raises(ConfigError, match="expected 3"):
            initial_state(cfg, system)

    def test_drawn_from_box(self):
        cfg = load_run_config(seed=8)
        system, _ = build_system(cfg)
        state = initial_state(cfg, system)
        assert system.invariant_box().contains(state, n_nodes=2)
        np.testing.assert_array_equal(state, initial_state(load_run_config(seed=8), system))
