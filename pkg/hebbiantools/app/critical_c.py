import json
from pathlib import Path

from hebbiantools.lib.symmetric import DomainError, critical_c0, critical_xhat0
from hebbiantools.utils.path_tools import write_text


class CriticalValueError(Exception):
    """Raised when the critical learning rate cannot be computed."""


def run(out_dir: Path | None = None) -> dict[str, float]:
    """
    Computes the critical learning rate ``c0`` of the symmetric motif and the diagonal root
    ``x0`` it belongs to.

    :param out_dir: If given, the values are also written to ``critical_c.json``.
    :type out_dir: Optional[Path]
    :return: ``{"c0": ..., "x_hat0": ...}``.
    :rtype: dict[str, float]
    """
    try:
        values = {"c0": critical_c0(), "x_hat0": critical_xhat0()}
    except DomainError as e:
        raise CriticalValueError(e) from e
    if out_dir is not None:
        write_text(out_dir / "critical_c.json", json.dumps(values, indent=2) + "\n")
    return values
