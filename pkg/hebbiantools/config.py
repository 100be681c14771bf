"""
Run configuration of the command line interface.

A run is fully described by one JSON document validated by :class:`RunConfig`. Dotted overrides
(``--set newton.n_starts=512``) are applied to the raw document before validation.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from hebbiantools import constants as const
from hebbiantools.constants import Method, StartStrategy, TopologyKind
from hebbiantools.core.network import (
    ModelError,
    NetworkSpec,
    bidirectional_motif,
    single_synapse_motif,
)
from hebbiantools.core.systems import SYSTEMS_LOOKUP, DefaultSystem, NetworkSystem
from hebbiantools.lib.equilibria import EquilibriumError, NewtonConfig
from hebbiantools.lib.integrate import IntegrationConfig, IntegrationError
from hebbiantools.lib.netgen import (
    GeneratedNetwork,
    TopologyConfig,
    TopologyError,
    asymmetric_motif_preset,
    build_network,
    symmetric_motif_preset,
)
from hebbiantools.utils.misc import config_digest


class ConfigError(Exception):
    """Raised when a run configuration is invalid."""


class SystemKind(str, Enum):
    """The systems a run can operate on."""

    NETWORK = "network"
    REDUCED3 = "reduced3"
    PLANAR = "planar"
    BIDIRECTIONAL_MOTIF = "bidirectional_motif"
    SINGLE_SYNAPSE_MOTIF = "single_synapse_motif"
    SYMMETRIC_MOTIF = "symmetric_motif"
    ASYMMETRIC_MOTIF = "asymmetric_motif"
    RANDOM_MIXED = "random_mixed"
    INTERCONNECTED = "interconnected"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemSection(_Section):
    """
    ``c`` parameterizes the reduced systems and the initial learning rate of the motif presets;
    ``params`` holds keyword arguments of the motif constructors (``a1``, ``c2``...); ``spec`` is
    a full network specification for ``kind = network``.
    """

    kind: SystemKind = SystemKind.REDUCED3
    c: float = -3.0
    params: dict[str, float] = Field(default_factory=dict)
    spec: dict[str, Any] | None = None
    ratio: float = 0.8

    @model_validator(mode="after")
    def _check_kind(self) -> "SystemSection":
        if self.c == 0:
            raise ValueError("system.c must be nonzero")
        if self.kind == SystemKind.NETWORK and self.spec is None:
            raise ValueError("system.spec is required for kind network")
        return self


class IntegrationSection(_Section):
    """Mirrors :class:`hebbiantools.lib.integrate.IntegrationConfig`."""

    method: Method = Method.RK45_ADAPTIVE
    dt: float = Field(default=const.DEFAULT_DT, gt=0)
    t_max: float = Field(default=const.DEFAULT_T_MAX, gt=0)
    abs_tol: float = Field(default=const.DEFAULT_ABS_TOL, gt=0)
    rel_tol: float = Field(default=const.DEFAULT_REL_TOL, gt=0)
    record_every: int = Field(default=1, ge=1)
    convergence_eps: float = Field(default=const.DEFAULT_CONVERGENCE_EPS, gt=0)
    burn_in: float = Field(default=const.DEFAULT_BURN_IN, ge=0)


class NewtonSection(_Section):
    """Mirrors :class:`hebbiantools.lib.equilibria.NewtonConfig`; the seed is the run seed."""

    n_starts: int | None = Field(default=None, ge=1)
    start_strategy: StartStrategy = StartStrategy.SOBOL
    max_iters: int = Field(default=const.NEWTON_MAX_ITERS, ge=1)
    newton_tol: float = Field(default=const.NEWTON_TOL, gt=0)
    dedup_tol: float = Field(default=const.DEDUP_REL_TOL, gt=0)
    backtrack_factor: float = Field(default=const.BACKTRACK_FACTOR, gt=0, lt=1)
    max_backtracks: int = Field(default=const.MAX_BACKTRACKS, ge=1)


class SweepSection(_Section):
    """The learning-rate grid and what to do with detected transitions."""

    c_lo: float = -150.0
    c_hi: float = -3.0
    n_points: int = Field(default=const.DEFAULT_SWEEP_POINTS, ge=2)
    foci: list[float] = Field(default_factory=list)
    width: float | None = Field(default=None, gt=0)
    targets: list[int] | None = None
    projection: int = Field(default=0, ge=0)
    refine: bool = True
    refine_tol: float = Field(default=const.REFINE_TOL, gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "SweepSection":
        if self.c_lo == self.c_hi:
            raise ValueError("sweep.c_lo and sweep.c_hi must differ")
        return self


class TopologySection(_Section):
    """Mirrors :class:`hebbiantools.lib.netgen.TopologyConfig`; the seed is the run seed."""

    n: int = Field(default=12, ge=2)
    k: int = Field(default=3, ge=2)
    density: float = Field(default=0.25, gt=0, le=1)
    bidirectional_fraction: float = Field(default=0.5, ge=0, le=1)
    decay_range: tuple[float, float] = const.DEFAULT_DECAY_RANGE
    c_range: tuple[float, float] = const.DEFAULT_C_RANGE
    c_exclusion: float = Field(default=const.DEFAULT_C_EXCLUSION, ge=0)
    self_loops: bool = False


class InitialStateSection(_Section):
    """An explicit initial state, or a uniform draw from the invariant box."""

    values: list[float] | None = None


class VerifySection(_Section):
    """Comma-separated suite selector of the ``verify`` command."""

    suite: str = "all"


class RunConfig(_Section):
    """
    The complete, versioned description of a run.

    .. code-block:: json

        {"schema_version": 1, "seed": 7, "system": {"kind": "reduced3", "c": -3.0}}
    """

    schema_version: Literal[1] = const.SCHEMA_VERSION
    seed: int = 0
    jobs: int = Field(default=1, ge=1)
    system: SystemSection = Field(default_factory=SystemSection)
    integration: IntegrationSection = Field(default_factory=IntegrationSection)
    newton: NewtonSection = Field(default_factory=NewtonSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    topology: TopologySection = Field(default_factory=TopologySection)
    initial_state: InitialStateSection = Field(default_factory=InitialStateSection)
    verify: VerifySection = Field(default_factory=VerifySection)

    @property
    def digest(self) -> str:
        """The SHA-256 of the canonical JSON of the validated document."""
        return config_digest(self.model_dump(mode="json"))

    def integration_config(self) -> IntegrationConfig:
        """The in-library integration options."""
        try:
            return IntegrationConfig(**self.integration.model_dump())
        except IntegrationError as e:
            raise ConfigError(f"integration: {e}") from e

    def newton_config(self) -> NewtonConfig:
        """The in-library Newton options, seeded with the run seed."""
        try:
            return NewtonConfig(seed=self.seed, **self.newton.model_dump())
        except EquilibriumError as e:
            raise ConfigError(f"newton: {e}") from e

    def topology_config(self) -> TopologyConfig:
        """The in-library generator options for the selected preset."""
        kind = (
            TopologyKind.INTERCONNECTED
            if self.system.kind == SystemKind.INTERCONNECTED
            else TopologyKind.RANDOM_MIXED
        )
        try:
            return TopologyConfig(kind=kind, seed=self.seed, **self.topology.model_dump())
        except TopologyError as e:
            raise ConfigError(f"topology: {e}") from e


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """
    Applies ``dotted.path=value`` overrides to a raw configuration document.

    Values are parsed as JSON and fall back to plain strings. Missing intermediate sections are
    created.

    :param raw: The raw document, modified in place.
    :type raw: dict[str, Any]
    :param overrides: The overrides.
    :type overrides: list[str]
    :return: The updated document.
    :rtype: dict[str, Any]
    :raises ConfigError: If an override is malformed.
    """
    for override in overrides:
        path, sep, value = override.partition("=")
        keys = path.strip().split(".")
        if not sep or not all(keys):
            raise ConfigError(f"malformed override {override!r}, expected dotted.path=value")
        node = raw
        for key in keys[:-1]:
            child = node.setdefault(key, {})
            if not isinstance(child, dict):
                raise ConfigError(f"override {override!r}: {key!r} is not a section")
            node = child
        node[keys[-1]] = _parse_value(value.strip())
    return raw


def _format_validation_error(error: ValidationError) -> str:
    messages = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        messages.append(f"{location}: {item['msg']}")
    return "; ".join(messages)


def load_run_config(
    path: str | Path | None = None,
    overrides: list[str] | None = None,
    seed: int | None = None,
    jobs: int | None = None,
) -> RunConfig:
    """
    Reads, overrides and validates a run configuration.

    :param path: The JSON document; ``None`` starts from the defaults.
    :type path: Optional[Union[str, Path]]
    :param overrides: ``dotted.path=value`` overrides.
    :type overrides: Optional[list[str]]
    :param seed: Overrides the ``seed`` field.
    :type seed: Optional[int]
    :param jobs: Overrides the ``jobs`` field.
    :type jobs: Optional[int]
    :return: The validated configuration.
    :rtype: RunConfig
    :raises ConfigError: If the file cannot be read or the document is invalid.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    apply_overrides(raw, overrides or [])
    if seed is not None:
        raw["seed"] = seed
    if jobs is not None:
        raw["jobs"] = jobs
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e)) from e


def build_system(cfg: RunConfig) -> tuple[DefaultSystem, GeneratedNetwork | None]:
    """
    Builds the system a run operates on.

    :param cfg: The run configuration.
    :type cfg: RunConfig
    :return: The system, and for network presets the generated network with its swept edges.
    :rtype: tuple[DefaultSystem, Optional[GeneratedNetwork]]
    :raises ConfigError: If the parameters violate a model invariant.
    """
    section = cfg.system
    try:
        if section.kind in (SystemKind.REDUCED3, SystemKind.PLANAR):
            return SYSTEMS_LOOKUP[section.kind.value](section.c), None  # type: ignore[call-arg]
        if section.kind == SystemKind.NETWORK:
            return NetworkSystem(NetworkSpec.from_dict(section.spec or {})), None
        if section.kind == SystemKind.BIDIRECTIONAL_MOTIF:
            return NetworkSystem(bidirectional_motif(**section.params)), None
        if section.kind == SystemKind.SINGLE_SYNAPSE_MOTIF:
            return NetworkSystem(single_synapse_motif(**section.params)), None
        if section.kind == SystemKind.SYMMETRIC_MOTIF:
            generated = symmetric_motif_preset(c=section.c)
        elif section.kind == SystemKind.ASYMMETRIC_MOTIF:
            generated = asymmetric_motif_preset(ratio=section.ratio, c=section.c)
        else:
            generated = build_network(cfg.topology_config())
    except (ModelError, TopologyError) as e:
        raise ConfigError(str(e)) from e
    except TypeError as e:
        raise ConfigError(f"system.params: {e}") from e
    return NetworkSystem(generated.spec), generated


def initial_state(cfg: RunConfig, system: DefaultSystem) -> np.ndarray:
    """
    The configured initial state, or a uniform draw from the invariant box seeded with the run
    seed.

    :raises ConfigError: If the explicit state has the wrong length.
    """
    values = cfg.initial_state.values
    if values is not None:
        if len(values) != system.dimension:
            raise ConfigError(
                f"initial_state.values has {len(values)} entries, expected {system.dimension}"
            )
        return np.array(values, dtype=float)
    try:
        upper = system.invariant_box().upper(system.n_nodes, system.n_weights)
    except ModelError as e:
        raise ConfigError(str(e)) from e
    return np.random.default_rng(cfg.seed).uniform(-upper, upper)
