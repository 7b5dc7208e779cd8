from __future__ import annotations

import numpy as np
import pytest

from paragroup.app.checks import SUITES, CheckRunner, lp_suite, repr_suite
from paragroup.config.settings import AppSettings


def test_unknown_suite_is_rejected(tmp_path):
    runner = CheckRunner(settings=AppSettings(), output_dir=tmp_path, suites=["repr", "nope"])
    with pytest.raises(ValueError):
        runner.collect()


def test_suite_names():
    assert list(SUITES) == ["repr", "transform", "diffops", "lp", "symcalc", "paradiff"]


@pytest.mark.parametrize("suite", [repr_suite, lp_suite])
def test_fast_suites_pass(suite):
    results = suite(AppSettings(), np.random.default_rng(0))
    assert results
    assert [r.name for r in results if not r.passed] == []
