import json
import logging
from pathlib import Path
from typing import Any

from hebbiantools import constants as const
from hebbiantools.config import ConfigError, RunConfig, build_system
from hebbiantools.lib.bifurcation import (
    BifurcationError,
    SweepResult,
    SweepSpec,
    count_windows,
    export_diagram,
    refine_transition,
    sweep,
    sweep_grid,
)
from hebbiantools.utils.path_tools import write_text

logger = logging.getLogger(__name__)


class SweepError(Exception):
    """Raised when a learning-rate sweep fails."""


def build_sweep_spec(cfg: RunConfig) -> SweepSpec:
    """
    The sweep described by ``cfg``.

    Explicit ``sweep.targets`` win over the swept edges of a generated network; the preset ratios
    only apply to the preset's own edges.

    :param cfg: The run configuration.
    :type cfg: RunConfig
    :return: The in-library sweep specification.
    :rtype: SweepSpec
    :raises ConfigError: If the grid, the targets or the ratios are invalid.
    """
    system, generated = build_system(cfg)
    section = cfg.sweep
    targets, ratios = section.targets, None
    if targets is None and generated is not None:
        targets, ratios = generated.swept_edges, generated.ratios
    try:
        grid = sweep_grid(section.c_lo, section.c_hi, section.n_points, section.foci, section.width)
        return SweepSpec(
            system=system,
            c_values=grid,
            targets=targets,
            ratios=ratios,
            newton=cfg.newton_config(),
            seed=cfg.seed,
            projection=section.projection,
            refine_tol=section.refine_tol,
        )
    except BifurcationError as e:
        raise ConfigError(f"sweep: {e}") from e


def transitions_report(
    result: SweepResult, refined: list[float | None]
) -> dict[str, Any]:
    """The ``transitions.json`` document."""
    transitions = result.transitions_to_dict()
    for item, estimate in zip(transitions, refined):
        item["refined_c"] = estimate
    counts = sorted(set(result.counts))
    return {
        "schema_version": const.SCHEMA_VERSION,
        "c_values": [float(c) for c in result.c_values],
        "counts": result.counts,
        "transitions": transitions,
        "windows": {str(count): count_windows(result, count) for count in counts},
    }


def run(cfg: RunConfig, out_dir: Path) -> list[Path]:
    """
    Sweeps the targeted learning rates, refines every transition and writes ``diagram.csv`` and
    ``transitions.json``.

    A transition that cannot be refined, because its bracket holds several count changes, is
    reported with ``refined_c = null``.

    :param cfg: The run configuration.
    :type cfg: RunConfig
    :param out_dir: The output directory.
    :type out_dir: Path
    :return: The written files.
    :rtype: list[Path]
    :raises SweepError: If a grid value has no equilibrium or the system has inputs.
    """
    spec = build_sweep_spec(cfg)
    try:
        result = sweep(spec, jobs=cfg.jobs)
    except BifurcationError as e:
        raise SweepError(e) from e

    refined: list[float | None] = []
    for index in range(len(result.transitions)):
        if not cfg.sweep.refine:
            refined.append(None)
            continue
        try:
            refined.append(refine_transition(result, index, cfg.sweep.refine_tol, cfg.jobs))
        except BifurcationError as e:
            logger.warning("Transition #%d not refined: %s", index, e)
            refined.append(None)

    diagram = write_text(out_dir / "diagram.csv", export_diagram(result))
    report = write_text(
        out_dir / "transitions.json",
        json.dumps(transitions_report(result, refined), indent=2) + "\n",
    )
    return [diagram, report]
