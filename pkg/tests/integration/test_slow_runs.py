from __future__ import annotations

import json
import os

import pytest

import paragroup.main as cli
from paragroup.core import parallel

pytestmark = pytest.mark.skipif(
    os.getenv("PARAGROUP_SLOW") != "1", reason="set PARAGROUP_SLOW=1 to run slow tests"
)


@pytest.fixture(autouse=True)
def _reset_parallel():
    yield
    parallel.configure(deterministic=False)


def _run(tmp_path, *args: str) -> dict:
    base = ["--config", str(tmp_path / "settings.json"), "--output", str(tmp_path / "out")]
    code = cli.main([*base, *args])
    assert code == 0
    return json.loads((tmp_path / "out" / args[-1] / "report.json").read_text(encoding="utf-8"))


def test_all_invariant_suites_pass(tmp_path):
    report = _run(tmp_path, "check")
    failed = [r["name"] for r in report["results"] if not r["passed"]]
    assert failed == []


def test_linear_dispersion(tmp_path):
    report = _run(tmp_path, "spectrum")
    assert report["max_relative_error"] <= 0.02


def test_conservation_over_short_run(tmp_path):
    report = _run(tmp_path, "simulate")
    assert report["volume_drift"] <= 1e-6
    assert report["hamiltonian_drift"] <= 1e-4
    assert report["max_momentum"] <= 1e-6


def test_dn_remainder_is_second_order(tmp_path):
    report = _run(tmp_path, "dn-compare")
    assert report["remainder_slope"] >= 1.8
    assert report["relative_at_smallest"] <= 0.05
    assert report["factorization_relative"] < 1.0
    assert report["depth_derivative_error"] < 1e-6
    assert (tmp_path / "out" / "dn-compare" / "factorization.csv").exists()
