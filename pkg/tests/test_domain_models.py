from __future__ import annotations

import math

import pytest

from paragroup.domain.errors import ConditioningError, IndexRangeError, ParagroupError
from paragroup.domain.models import CheckResult, ConservedQuantities, EulerPoint, RepLabel


def test_rep_label_half_integer_properties():
    label = RepLabel(3)
    assert label.l == 1.5
    assert label.dim == 4
    assert not label.is_integer
    assert label.casimir == pytest.approx(3.75)
    assert label.size == pytest.approx(math.sqrt(4.75))
    assert label.indices() == (-1.5, -0.5, 0.5, 1.5)
    assert label.position(0.5) == 2


def test_rep_label_of_accepts_half_integers_only():
    assert RepLabel.of(2.5) == RepLabel(5)
    with pytest.raises(IndexRangeError):
        RepLabel.of(0.3)


def test_rep_label_rejects_negative():
    with pytest.raises(IndexRangeError):
        RepLabel(-1)


@pytest.mark.parametrize("index", [1.0, 2.5, 0.25])
def test_position_rejects_bad_index(index):
    with pytest.raises(IndexRangeError):
        RepLabel(3).position(index)


def test_euler_point_chart():
    EulerPoint(0.0, 0.0, -2 * math.pi)
    with pytest.raises(IndexRangeError):
        EulerPoint(7.0, 0.0, 0.0)
    with pytest.raises(IndexRangeError):
        EulerPoint(0.0, 0.0, 2 * math.pi)
    with pytest.raises(IndexRangeError):
        EulerPoint(0.0, -0.1, 0.0)


def test_check_result_passed():
    assert CheckResult("s", "n", 1e-3, 1e-3).passed
    assert not CheckResult("s", "n", 2e-3, 1e-3).passed
    assert not CheckResult("s", "n", float("nan"), 1.0).passed


def test_hamiltonian_is_area_plus_kinetic():
    q = ConservedQuantities(1.0, 2.0, 0.5, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    assert q.hamiltonian == 2.5


def test_error_reasons():
    assert IndexRangeError("x").reason == "index_range"
    assert isinstance(IndexRangeError("x"), ValueError)
    assert ConditioningError("x").reason == "conditioning"
    assert ParagroupError("x", reason="trefftz_residual").reason == "trefftz_residual"
