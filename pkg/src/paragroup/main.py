from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path

from paragroup.app.checks import SUITES, CheckRunner
from paragroup.app.experiments import (
    DnCompareRunner,
    SimulateRunner,
    SpectrumRunner,
    TransformRunner,
)
from paragroup.app.outputs import (
    LOG_DATEFMT,
    LOG_FORMAT,
    attach_file_log,
    detach_file_log,
    write_manifest,
)
from paragroup.config.paths import default_settings_path, output_dir
from paragroup.config.settings import AppSettings, load_settings, schema, to_dict
from paragroup.core import parallel
from paragroup.domain.errors import ParagroupError

# Configure logging for the entire application
logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, datefmt=LOG_DATEFMT)

logger = logging.getLogger(__name__)

COMMANDS = ("transform", "check", "dn-compare", "simulate", "spectrum")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paragroup")
    parser.add_argument("--version", action="store_true", help="Print version and exit")

    parser.add_argument(
        "--config",
        type=Path,
        default=default_settings_path(),
        help="Path to settings JSON (default: user config dir)",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override run.seed")
    parser.add_argument(
        "--deterministic",
        action="store_true",
        help="Single worker, so outputs are byte-identical across runs",
    )
    parser.add_argument(
        "--output",
        type=Path,
        default=None,
        help="Override run.output_dir (outputs go to <dir>/<command>)",
    )
    parser.add_argument(
        "--print-config", action="store_true", help="Print the effective settings as JSON and exit"
    )
    parser.add_argument(
        "--print-schema", action="store_true", help="Print the settings JSON schema and exit"
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    sub = parser.add_subparsers(dest="command")

    sub.add_parser("transform", help="Forward/inverse round trip with a Plancherel report")

    check = sub.add_parser("check", help="Run the invariant suites (exit 1 on any failure)")
    check.add_argument(
        "--suite",
        action="append",
        choices=list(SUITES),
        default=None,
        help="Suite to run; repeat for several (default: all)",
    )

    sub.add_parser("dn-compare", help="Reference vs paralinearized Dirichlet-Neumann tables")
    sub.add_parser("simulate", help="Evolve the water-wave system and record conserved quantities")
    sub.add_parser("spectrum", help="Fit linear oscillation frequencies of single modes")

    return parser


def _load_settings_or_default(path: Path) -> AppSettings:
    if path.exists():
        return load_settings(path)
    return AppSettings()


def _apply_overrides(settings: AppSettings, args: argparse.Namespace) -> AppSettings:
    if args.seed is not None:
        settings.run.seed = args.seed
    if args.deterministic:
        settings.run.deterministic = True
    if args.output is not None:
        settings.run.output_dir = str(args.output)
    settings.validate()
    return settings


def _create_runner(args: argparse.Namespace, settings: AppSettings, directory: Path):
    if args.command == "transform":
        return TransformRunner(settings=settings, output_dir=directory)
    if args.command == "check":
        suites = args.suite or list(SUITES)
        return CheckRunner(settings=settings, output_dir=directory, suites=suites)
    if args.command == "dn-compare":
        return DnCompareRunner(settings=settings, output_dir=directory, config_path=args.config)
    if args.command == "simulate":
        return SimulateRunner(settings=settings, output_dir=directory)
    if args.command == "spectrum":
        return SpectrumRunner(settings=settings, output_dir=directory)
    raise ValueError(f"unknown command {args.command!r}")


def _reason(exc: Exception) -> str:
    if isinstance(exc, ParagroupError):
        return exc.reason
    return "invalid_value"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        from . import __version__

        print(__version__)
        return 0

    if args.print_schema:
        print(json.dumps(schema(), indent=2))
        return 0

    try:
        settings = _apply_overrides(_load_settings_or_default(args.config), args)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"Error: invalid_config: {exc}", flush=True)
        return 2

    if args.print_config:
        print(json.dumps(to_dict(settings), indent=2))
        return 0

    if args.command not in COMMANDS:
        parser.print_help()
        return 2

    level = logging.DEBUG if args.verbose else logging.INFO
    logging.getLogger().setLevel(level)
    parallel.configure(deterministic=settings.run.deterministic)

    directory = output_dir(settings.run.output_dir, args.command)
    handler = attach_file_log(directory, level=level)
    try:
        parallel.worker_count()
        write_manifest(directory, args.command, settings)
        logger.info(f"[CLI] {args.command} -> {directory}")
        return _create_runner(args, settings, directory).run()
    except (ParagroupError, ValueError) as exc:
        logger.error(f"[CLI] {args.command} failed: {exc}")
        print(f"Error: {_reason(exc)}: {exc}", flush=True)
        return 2
    finally:
        detach_file_log(handler)


if __name__ == "__main__":
    raise SystemExit(main())
