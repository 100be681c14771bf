"""
The ``hebbiantools`` command line interface.

.. code-block:: console

    hebbiantools critical-c
    hebbiantools equilibria --config run.json --set system.c=-150 --out results
    hebbiantools sweep --config run.json --jobs 4 --out results
    hebbiantools verify --suite pitchfork,hygiene --out results

Every command writes its artifacts and a ``manifest.json`` to ``--out``. Exit codes: ``0``
success, ``1`` runtime anomaly, ``2`` configuration error.
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path

from hebbiantools import __version__
from hebbiantools import constants as const
from hebbiantools.app import critical_c, equilibria, simulate, sweep, verify
from hebbiantools.config import ConfigError, RunConfig, load_run_config
from hebbiantools.constants import ExitCode
from hebbiantools.utils.misc import file_sha256, stopwatch
from hebbiantools.utils.path_tools import ensure_out_dir, write_text

logger = logging.getLogger("hebbiantools")

RUNTIME_ERRORS = (
    simulate.SimulateError,
    equilibria.EquilibriaError,
    sweep.SweepError,
    critical_c.CriticalValueError,
    verify.VerifyError,
)

Command = Callable[[RunConfig, Path, argparse.Namespace], list[Path]]


def _simulate(cfg: RunConfig, out_dir: Path, _: argparse.Namespace) -> list[Path]:
    return simulate.run(cfg, out_dir)


def _equilibria(cfg: RunConfig, out_dir: Path, _: argparse.Namespace) -> list[Path]:
    return equilibria.run(cfg, out_dir)


def _sweep(cfg: RunConfig, out_dir: Path, _: argparse.Namespace) -> list[Path]:
    return sweep.run(cfg, out_dir)


def _critical_c(_: RunConfig, out_dir: Path, __: argparse.Namespace) -> list[Path]:
    values = critical_c.run(out_dir)
    print(f"c0 = {values['c0']:{const.FLOAT_FORMAT}}")
    print(f"x_hat0 = {values['x_hat0']:{const.FLOAT_FORMAT}}")
    return [out_dir / "critical_c.json"]


def _verify(cfg: RunConfig, out_dir: Path, args: argparse.Namespace) -> list[Path]:
    ctx = verify.VerifyContext(
        seed=cfg.seed,
        jobs=cfg.jobs,
        newton=cfg.newton_config(),
        integration=cfg.integration_config(),
    )
    report, outputs = verify.run(args.suite or cfg.verify.suite, out_dir, ctx)
    print(f"{len(report.results)} criteria passed")
    return outputs


COMMANDS: dict[str, tuple[Command, str]] = {
    "simulate": (_simulate, "Integrate one trajectory and write trajectory.csv."),
    "equilibria": (_equilibria, "Find and classify every equilibrium; write equilibria.json."),
    "sweep": (_sweep, "Sweep learning rates; write diagram.csv and transitions.json."),
    "critical-c": (_critical_c, "Print the critical learning rate c0 and its diagonal root."),
    "verify": (_verify, "Run verification suites; write verify_report.json."),
}


def build_parser() -> argparse.ArgumentParser:
    """The argument parser with one subcommand per entry of :data:`COMMANDS`."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, help="override the configuration seed")
    common.add_argument("--jobs", type=int, help="number of worker processes")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="PATH=VALUE",
        help="override a dotted configuration path, e.g. newton.n_starts=512",
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings only")

    parser = argparse.ArgumentParser(
        prog="hebbiantools",
        description="Dynamics, equilibria and bifurcations of Hebbian recurrent networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        subparser = subparsers.add_parser(name, parents=[common], help=help_text)
        if name == "verify":
            subparser.add_argument(
                "--suite", help="comma-separated suites, or 'all' (default: config verify.suite)"
            )
    return parser


def write_manifest(
    command: str, cfg: RunConfig, out_dir: Path, outputs: list[Path], wall_time: float
) -> Path:
    """
    Writes ``manifest.json``: the command, the configuration and its digest, the seed, the tool
    version, the wall time and the SHA-256 of every output.

    :return: The manifest path.
    :rtype: Path
    """
    manifest = {
        "schema_version": const.SCHEMA_VERSION,
        "command": command,
        "config_digest": cfg.digest,
        "config": cfg.model_dump(mode="json"),
        "seed": cfg.seed,
        "version": __version__,
        "wall_time": wall_time,
        "outputs": [{"path": path.name, "sha256": file_sha256(path)} for path in outputs],
    }
    return write_text(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")


def main(argv: list[str] | None = None) -> int:
    """
    Runs the command line interface.

    :param argv: The arguments, by default ``sys.argv[1:]``.
    :type argv: Optional[list[str]]
    :return: The exit code.
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(format="%(levelname)s: %(message)s", level=level)

    try:
        cfg = load_run_config(args.config, args.overrides, seed=args.seed, jobs=args.jobs)
        out_dir = ensure_out_dir(args.out)
    except (ConfigError, NotADirectoryError) as e:
        logger.error("%s", e)
        return ExitCode.CONFIG_ERROR

    command, _ = COMMANDS[args.command]
    with stopwatch() as timing:
        try:
            outputs = command(cfg, out_dir, args)
        except (ConfigError, verify.UnknownSuiteError) as e:
            logger.error("%s", e)
            return ExitCode.CONFIG_ERROR
        except RUNTIME_ERRORS as e:
            logger.error("%s", e)
            return ExitCode.RUNTIME_ANOMALY
    write_manifest(args.command, cfg, out_dir, outputs, timing["elapsed"])
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(main())
