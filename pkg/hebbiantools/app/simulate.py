import logging
from pathlib import Path

from hebbiantools.config import RunConfig, build_system, initial_state
from hebbiantools.constants import TerminalReason
from hebbiantools.lib.integrate import IntegrationError, integrate
from hebbiantools.utils.path_tools import write_text

logger = logging.getLogger(__name__)


class SimulateError(Exception):
    """Raised when a simulation fails or its trajectory diverges."""


def run(cfg: RunConfig, out_dir: Path) -> list[Path]:
    """
    Integrates one trajectory of the configured system and writes it to ``trajectory.csv``.

    The trajectory file is written even when the trajectory diverges, so that the divergence can
    be inspected.

    :param cfg: The run configuration.
    :type cfg: RunConfig
    :param out_dir: The output directory.
    :type out_dir: Path
    :return: The written files.
    :rtype: list[Path]
    :raises SimulateError: If the integration fails or diverges.
    """
    system, _ = build_system(cfg)
    s0 = initial_state(cfg, system)
    try:
        trajectory = integrate(system, s0, cfg.integration_config())
    except IntegrationError as e:
        raise SimulateError(e) from e

    path = write_text(out_dir / "trajectory.csv", trajectory.to_csv())
    logger.info(
        "%s at t=%.6g after %d samples",
        trajectory.terminal_reason.value,
        trajectory.terminal_time,
        trajectory.n_samples,
    )
    if trajectory.terminal_reason == TerminalReason.DIVERGED:
        raise SimulateError(f"trajectory diverged: {trajectory.diagnostic}")
    return [path]
