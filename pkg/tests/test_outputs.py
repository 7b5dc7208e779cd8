"""Tests for run outputs and the rotating file log."""

from __future__ import annotations

import csv
import json
import logging

from paragroup.app.outputs import attach_file_log, detach_file_log, write_manifest, write_rows
from paragroup.config.settings import AppSettings


def test_file_log_mirrors_root_logger(tmp_path):
    handler = attach_file_log(tmp_path)
    try:
        logging.getLogger("paragroup.test").warning("[Test] hello log")
    finally:
        detach_file_log(handler)

    log_file = tmp_path / "paragroup.log"
    assert log_file.exists()
    assert "[Test] hello log" in log_file.read_text(encoding="utf-8")
    assert handler not in logging.getLogger().handlers


def test_write_rows_keeps_full_precision(tmp_path):
    path = tmp_path / "table.csv"
    count = write_rows(path, ["n", "value"], [[1, 0.1], [2, 1.0 / 3.0]])
    assert count == 2
    with path.open(encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["n", "value"]
    assert float(rows[2][1]) == 1.0 / 3.0


def test_manifest_records_settings(tmp_path):
    settings = AppSettings()
    settings.run.seed = 11
    path = write_manifest(tmp_path, "spectrum", settings)
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["command"] == "spectrum"
    assert data["seed"] == 11
    assert data["settings"]["spectrum"]["modes"] == [2, 3, 4]
