import json
import logging
from pathlib import Path

from hebbiantools import constants as const
from hebbiantools.config import RunConfig, build_system
from hebbiantools.core.network import ModelError, is_bidirectional_motif
from hebbiantools.core.systems import NetworkSystem
from hebbiantools.lib.equilibria import EquilibriumError, search_equilibria
from hebbiantools.lib.stability import contraction_certificate
from hebbiantools.utils.path_tools import write_text

logger = logging.getLogger(__name__)


class EquilibriaError(Exception):
    """Raised when the equilibrium search fails or finds nothing."""


def run(cfg: RunConfig, out_dir: Path) -> list[Path]:
    """
    Finds and classifies every equilibrium of the configured system and writes
    ``equilibria.json``.

    For the bidirectional motif the document also carries the contraction certificate.

    :param cfg: The run configuration.
    :type cfg: RunConfig
    :param out_dir: The output directory.
    :type out_dir: Path
    :return: The written files.
    :rtype: list[Path]
    :raises EquilibriaError: If the system has inputs or no start converged.
    """
    system, _ = build_system(cfg)
    try:
        search = search_equilibria(system, cfg.newton_config(), jobs=cfg.jobs)
    except (EquilibriumError, ModelError) as e:
        raise EquilibriaError(e) from e

    document = {
        "schema_version": const.SCHEMA_VERSION,
        "system": system.to_dict(),
        **search.to_dict(),
    }
    if isinstance(system, NetworkSystem) and is_bidirectional_motif(system.spec):
        certificate = contraction_certificate(system.spec)
        document["certificate"] = certificate.to_dict()
        if certificate.verdict == const.Certificate.UNIQUE_GUARANTEED and search.count != 1:
            logger.warning(
                "The contraction certificate holds but %d equilibria were found", search.count
            )

    path = write_text(out_dir / "equilibria.json", json.dumps(document, indent=2) + "\n")
    if search.anomaly:
        raise EquilibriaError(
            f"no equilibrium found from {search.n_starts} starts ({search.status_counts})"
        )
    for record in search.records:
        logger.info(
            "%s: %s (%s)",
            ", ".join(f"{k}={v:.6g}" for k, v in zip(record.labels, record.point)),
            record.stability.value,
            record.symmetry_tag.value if record.symmetry_tag else "-",
        )
    return [path]
