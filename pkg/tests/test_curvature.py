from __future__ import annotations

import math

import numpy as np
import pytest

from paragroup.core.calculus.paradiff import AdmissibleCutoff, para_op
from paragroup.core.harmonic.representation import sphere_point
from paragroup.core.harmonic.spherical import SphFn, lift, project
from paragroup.core.water.geometry import (
    SurfaceState,
    cartesian_gradient,
    coordinate_functions,
    curvature_multiplier,
    curvature_symbol,
    mean_curvature,
    surface_grid,
)
from paragroup.domain.errors import AdmissibilityError
from paragroup.domain.models import RepLabel

ROOT_4PI = math.sqrt(4.0 * math.pi)


def _constant(l_max: int, c: float) -> SphFn:
    return SphFn.mode(l_max, 0, 0, c * ROOT_4PI)


def test_unit_sphere_has_curvature_two():
    h = mean_curvature(SphFn.zeros(4))
    assert h.mean().real == pytest.approx(2.0, abs=1e-12)
    assert h.without_degrees([0]).norm() < 1e-12


@pytest.mark.parametrize("c", [0.2, -0.1])
def test_round_sphere_of_other_radius(c):
    h = mean_curvature(_constant(4, c))
    assert h.mean().real == pytest.approx(2.0 / (1.0 + c), abs=1e-8)
    assert h.without_degrees([0]).norm() < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_linearization_matches_multiplier(n):
    eps = 1e-5
    mode = SphFn.real_mode(6, n, 1)
    derivative = (mean_curvature(mode * eps) - mean_curvature(mode * (-eps))) * (0.5 / eps)
    expected = mode * curvature_multiplier(n)
    assert (derivative - expected).norm() <= 1e-6 * expected.norm()


def test_curvature_multiplier_values():
    assert curvature_multiplier(1) == 0.0
    assert curvature_multiplier(2) == 4.0
    assert curvature_multiplier(3) == 10.0


def test_curvature_symbol_at_unit_sphere():
    grid = surface_grid(3)
    surface = SurfaceState.build(SphFn.zeros(3), grid)
    sym = curvature_symbol(surface, [0, 2, 4])
    for t in (0, 2, 4):
        label = RepLabel(t)
        expected = (label.casimir - 2.0) * np.eye(label.dim)
        assert np.allclose(sym.full(t), expected, atol=1e-12)


def test_large_perturbation_is_rejected():
    with pytest.raises(AdmissibilityError):
        SurfaceState.build(_constant(3, 0.6), surface_grid(3))


def test_coordinate_functions_are_cartesian_coordinates():
    grid = surface_grid(2)
    theta, psi = grid.points()
    expected = sphere_point(theta, psi)
    for coord, values in zip(coordinate_functions(), expected):
        assert np.allclose(coord.values(grid), values, atol=1e-12)


def test_gradient_of_height_function():
    grid = surface_grid(2)
    theta, psi = grid.points()
    omega = np.stack(sphere_point(theta, psi))
    z = coordinate_functions()[2]
    expected = np.array([0.0, 0.0, 1.0])[:, None, None] - np.cos(theta) * omega
    assert np.allclose(cartesian_gradient(z, grid), expected, atol=1e-12)


def test_normals_of_unit_sphere_are_radial():
    grid = surface_grid(3)
    theta, psi = grid.points()
    surface = SurfaceState.build(SphFn.zeros(3), grid)
    assert np.allclose(surface.normals(), np.stack(sphere_point(theta, psi)), atol=1e-12)


def _paralinearization_residual(zeta: SphFn) -> float:
    l_max = zeta.l_max
    surface = SurfaceState.build(zeta, surface_grid(l_max))
    h = curvature_symbol(surface, [2 * n for n in range(l_max + 1)])
    th = project(para_op(h, AdmissibleCutoff(), lift(zeta), 2 * l_max), l_max)
    return (mean_curvature(zeta) - _constant(l_max, 2.0) - th).norm()


def test_paralinearization_residual_is_quadratic():
    profile = SphFn.real_mode(6, 2, 1) + SphFn.real_mode(6, 3, 0) * 0.5
    small = _paralinearization_residual(profile * 0.01)
    large = _paralinearization_residual(profile * 0.02)
    assert small > 0.0
    assert 3.2 < large / small < 4.8
