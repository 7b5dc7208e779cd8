from __future__ import annotations

import math

import numpy as np
import pytest

from paragroup.core.harmonic.grids import SphereGrid
from paragroup.core.harmonic.io import load_sphfn, save_sphfn
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.harmonic.spherical import SphFn, lift, project, spherical_harmonic
from paragroup.domain.errors import IndexRangeError, InvarianceError


def test_values_are_spherical_harmonics():
    grid = SphereGrid.for_band(8)
    theta, psi = grid.points()
    for n, m in [(0, 0), (1, -1), (2, 1), (3, -2), (4, 4)]:
        values = SphFn.mode(4, n, m).values(grid)
        assert np.allclose(values, spherical_harmonic(n, m, theta, psi), atol=1e-12)


def test_sphere_roundtrip():
    rng = np.random.default_rng(0)
    grid = SphereGrid.for_band(12)
    g = SphFn.random(6, rng, real=False)
    back = SphFn.from_values(g.values(grid), grid, 6)
    assert np.allclose(back.coeffs, g.coeffs, atol=1e-10)


def test_real_mode_is_real():
    grid = SphereGrid.for_band(10)
    for m in (-3, -1, 0, 2):
        values = SphFn.real_mode(5, 3, m).values(grid)
        assert np.max(np.abs(values.imag)) < 1e-12
        assert np.max(np.abs(values.real)) > 0.1


def test_real_part_keeps_real_functions():
    rng = np.random.default_rng(1)
    g = SphFn.random(5, rng)
    assert np.allclose(g.real_part().coeffs, g.coeffs)


def test_norm_and_mean_use_normalized_measure():
    assert SphFn.mode(3, 2, 0).norm() == pytest.approx(1.0 / math.sqrt(4 * math.pi))
    assert SphFn.mode(3, 0, 0, math.sqrt(4 * math.pi)).mean() == pytest.approx(1.0)


def test_laplace_multiplier_on_modes():
    g = SphFn.mode(4, 3, 1, 2.0)
    assert g.laplace().get(3, 1) == pytest.approx(-24.0)


def test_mode_out_of_range():
    with pytest.raises(IndexRangeError):
        SphFn.mode(3, 4, 0)
    with pytest.raises(IndexRangeError):
        SphFn.zeros(3).get(2, 3)


def test_resize_keeps_shared_degrees():
    rng = np.random.default_rng(2)
    g = SphFn.random(3, rng)
    wide = g.resize(6)
    assert wide.get(3, -2) == g.get(3, -2)
    assert np.allclose(wide.resize(3).coeffs, g.coeffs)


def test_lift_project_roundtrip():
    rng = np.random.default_rng(3)
    g = SphFn.random(5, rng, real=False)
    lifted = lift(g)
    assert lifted.is_t3_invariant()
    assert np.allclose(project(lifted, 5).coeffs, g.coeffs, atol=1e-13)


def test_project_rejects_non_invariant_spectrum():
    rng = np.random.default_rng(4)
    with pytest.raises(InvarianceError):
        project(SpectralFn.random(4, rng))

    a = lift(SphFn.random(3, rng))
    a.blocks[4][0, 3] = 0.5 + 0.0j
    with pytest.raises(InvarianceError, match=r"\(l, n, m\) = \(2, 1, -2\)") as caught:
        project(a)
    assert caught.value.largest == pytest.approx(0.5)
    assert caught.value.where == (2.0, 1.0, -2.0)
    assert a.invariance_violation() == (pytest.approx(0.5), (2.0, 1.0, -2.0))
    assert not a.is_t3_invariant()


def test_lifted_synthesis_matches_sphere_values():
    rng = np.random.default_rng(5)
    grid = SphereGrid.for_band(10)
    g = SphFn.random(5, rng)
    assert np.allclose(grid.inverse(lift(g)), g.values(grid), atol=1e-12)


def test_frame_derivatives_sum_to_laplacian():
    rng = np.random.default_rng(6)
    g = SphFn.random(4, rng)
    total = SphFn.zeros(4)
    for j in (1, 2, 3):
        total = total + g.frame_derivative(j).frame_derivative(j)
    assert np.allclose(total.coeffs, g.laplace().coeffs, atol=1e-12)


def test_sphfn_file_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    g = SphFn.random(4, rng)
    path = tmp_path / "zeta.json"
    save_sphfn(path, g)
    assert np.allclose(load_sphfn(path).coeffs, g.coeffs)
