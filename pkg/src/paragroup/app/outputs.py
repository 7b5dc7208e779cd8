"""Output files shared by the subcommands: CSV tables, JSON reports, run manifests, file log."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Sequence
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any

from paragroup import __version__
from paragroup.config.paths import LOG_FILENAME, MANIFEST_FILENAME
from paragroup.config.settings import AppSettings, to_dict
from paragroup.core.harmonic.io import save_json

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_DATEFMT = "%H:%M:%S"


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """Write a CSV table; floats keep their full repr so reruns compare byte for byte."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    logger.debug(f"[CLI] wrote {count} rows to {path.name}")
    return count


def write_report(path: Path, payload: dict[str, Any]) -> None:
    save_json(path, payload)


def write_manifest(directory: Path, command: str, settings: AppSettings) -> Path:
    path = directory / MANIFEST_FILENAME
    save_json(
        path,
        {
            "command": command,
            "version": __version__,
            "seed": settings.run.seed,
            "deterministic": settings.run.deterministic,
            "settings": to_dict(settings),
        },
    )
    return path


def attach_file_log(directory: Path, *, level: int = logging.INFO) -> RotatingFileHandler:
    """Mirror the root logger into `<directory>/paragroup.log` (5 MB, no backups)."""
    directory.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(
        directory / LOG_FILENAME,
        maxBytes=5 * 1024 * 1024,  # 5MB
        backupCount=0,
        encoding="utf-8",
    )
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
    logging.getLogger().addHandler(handler)
    return handler


def detach_file_log(handler: RotatingFileHandler) -> None:
    logging.getLogger().removeHandler(handler)
    handler.close()
