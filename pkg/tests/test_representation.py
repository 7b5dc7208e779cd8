from __future__ import annotations

import math

import numpy as np
import pytest

from paragroup.core.harmonic.representation import (
    euler_to_su2,
    frame_symbol,
    group_inverse,
    group_multiply,
    hopf_project,
    laplace_multiplier,
    sigma,
    sphere_point,
    su2_to_euler,
    wigner_at,
    wigner_entry,
    wigner_entry_reference,
    wigner_small,
)
from paragroup.domain.errors import IndexRangeError
from paragroup.domain.models import IDENTITY, DiffTag, EulerPoint, RepLabel


def _points(seed: int, count: int) -> list[EulerPoint]:
    rng = np.random.default_rng(seed)
    return [
        EulerPoint(
            float(rng.uniform(0.0, 2 * math.pi)),
            float(rng.uniform(0.1, math.pi - 0.1)),
            float(rng.uniform(-2 * math.pi, 2 * math.pi)),
        )
        for _ in range(count)
    ]


@pytest.mark.parametrize("twice_l", range(7))
def test_frame_commutators(twice_l):
    x1, x2, x3 = (frame_symbol(j, twice_l) for j in (1, 2, 3))
    assert np.allclose(x1 @ x2 - x2 @ x1, x3, atol=1e-12)
    assert np.allclose(x2 @ x3 - x3 @ x2, x1, atol=1e-12)
    assert np.allclose(x3 @ x1 - x1 @ x3, x2, atol=1e-12)


@pytest.mark.parametrize("twice_l", range(9))
def test_casimir(twice_l):
    label = RepLabel(twice_l)
    total = sum(frame_symbol(j, label) @ frame_symbol(j, label) for j in (1, 2, 3))
    assert np.allclose(total, laplace_multiplier(label) * np.eye(label.dim), atol=1e-12)


def test_sigma_zero_is_diagonal_index():
    assert np.allclose(np.diag(sigma(DiffTag.ZERO, 2)), [-1.0, 0.0, 1.0])
    assert np.allclose(sigma("plus", 0), 0.0)


def test_frame_index_out_of_range():
    with pytest.raises(IndexRangeError):
        frame_symbol(4, 2)


def test_wigner_at_identity_is_identity():
    for t in range(6):
        assert np.allclose(wigner_at(RepLabel(t), IDENTITY), np.eye(t + 1), atol=1e-13)


@pytest.mark.parametrize("twice_l", range(7))
def test_wigner_small_matches_reference_formula(twice_l):
    label = RepLabel(twice_l)
    for theta in (0.4, 1.3, 2.6):
        small = wigner_small(twice_l, theta)
        for i, n in enumerate(label.indices()):
            for j, m in enumerate(label.indices()):
                ref = wigner_entry_reference(label, n, m, theta)
                assert abs(small[i, j] - ref) < 1e-10


def test_wigner_l1_middle_row():
    theta = 0.8
    x = EulerPoint(0.0, theta, 0.0)
    label = RepLabel(2)
    assert wigner_entry(label, 0, 0, x) == pytest.approx(math.cos(theta))
    assert wigner_entry(label, 0, 1, x) == pytest.approx(1j * math.sin(theta) / math.sqrt(2))


def test_unitarity_and_homomorphism():
    pts = _points(1, 6)
    for x, y in zip(pts[::2], pts[1::2]):
        xy = group_multiply(x, y)
        for t in range(7):
            label = RepLabel(t)
            tx, ty = wigner_at(label, x), wigner_at(label, y)
            assert np.allclose(tx @ tx.conj().T, np.eye(label.dim), atol=1e-12)
            assert np.allclose(wigner_at(label, xy), tx @ ty, atol=1e-10)


def test_su2_chart_roundtrip():
    for x in _points(2, 5):
        back = su2_to_euler(euler_to_su2(x))
        assert back.phi == pytest.approx(x.phi, abs=1e-12)
        assert back.theta == pytest.approx(x.theta, abs=1e-12)
        assert back.psi == pytest.approx(x.psi, abs=1e-12)


def test_group_inverse():
    x = _points(3, 1)[0]
    product = euler_to_su2(group_multiply(x, group_inverse(x)))
    assert np.allclose(product, np.eye(2), atol=1e-12)


def test_su2_to_euler_rejects_shape():
    with pytest.raises(IndexRangeError):
        su2_to_euler(np.eye(3))


def test_sphere_point_is_unit():
    theta = np.linspace(0.0, math.pi, 7)
    psi = np.linspace(0.0, 2 * math.pi, 7)
    x, y, z = sphere_point(theta, psi)
    assert np.allclose(x**2 + y**2 + z**2, 1.0)


def test_hopf_project_forgets_the_fibre():
    point = hopf_project(EulerPoint(0.3, 1.1, -0.4))
    assert point.shape == (3,)
    assert np.allclose(point, np.stack(sphere_point(1.1, -0.4)))
    assert np.allclose(hopf_project(EulerPoint(2.0, 1.1, -0.4)), point)
    assert np.allclose(hopf_project(IDENTITY), [0.0, 0.0, 1.0])
