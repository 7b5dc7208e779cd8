from __future__ import annotations

import math

import numpy as np
import pytest

from paragroup.core.calculus.paradiff import AdmissibleCutoff, para_op
from paragroup.core.harmonic.grids import SphereGrid
from paragroup.core.harmonic.spherical import SphFn, lift, project
from paragroup.core.water.dno import (
    binomial_root,
    build_factorization,
    chebyshev_derivative_matrix,
    chebyshev_nodes,
    depth_profile,
    factor_block,
    factorization_residual,
    flat_dn_multiplier,
    good_unknown,
    oracle_dn,
    paralinearized_dn,
    principal_root,
    remainder_report,
    solve_order_zero_reference,
)
from paragroup.core.water.geometry import SurfaceState, surface_grid
from paragroup.domain.errors import ConditioningError
from paragroup.domain.models import RepLabel


def _constant(l_max: int, c: float) -> SphFn:
    return SphFn.mode(l_max, 0, 0, c * math.sqrt(4.0 * math.pi))


def _perturbed_surface() -> SurfaceState:
    zeta = SphFn.real_mode(3, 2, 1, 0.02)
    return SurfaceState.build(zeta, surface_grid(3))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_oracle_on_unit_sphere_is_degree(n):
    phi = SphFn.real_mode(4, n, 1)
    result = oracle_dn(SphFn.zeros(4), phi)
    assert (result.value - phi * float(n)).norm() <= 1e-10 * phi.norm()
    assert result.condition < 10.0
    assert result.residual < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_on_round_sphere_of_radius(n):
    phi = SphFn.real_mode(4, n, 0)
    result = oracle_dn(_constant(4, 0.1), phi)
    assert (result.value - phi * (n / 1.1)).norm() <= 1e-9 * phi.norm()


def test_oracle_reports_bad_conditioning():
    with pytest.raises(ConditioningError):
        oracle_dn(_constant(4, 0.1), SphFn.real_mode(4, 2, 0), cond_threshold=2.0)


def test_flat_dn_multiplier():
    assert flat_dn_multiplier(RepLabel(0)) == -0.5
    assert flat_dn_multiplier(RepLabel(2)) == pytest.approx(math.sqrt(2.0) - 0.5)


def test_chebyshev_differentiation_is_exact_on_polynomials():
    nodes = chebyshev_nodes(9)
    assert nodes[0] == pytest.approx(-0.5)
    assert nodes[-1] == pytest.approx(0.0, abs=1e-15)
    d = chebyshev_derivative_matrix(nodes)
    assert np.allclose(d @ nodes**3, 3.0 * nodes**2, atol=1e-10)
    assert np.allclose(d @ np.ones_like(nodes), 0.0, atol=1e-10)


def test_principal_root_matches_binomial_series():
    surface = _perturbed_surface()
    for t in (1, 2, 4):
        assert np.allclose(principal_root(surface, t), binomial_root(surface, t), atol=1e-10)


def test_order_zero_solve_matches_scipy():
    surface = _perturbed_surface()
    block = factor_block(surface, 4)
    reference = solve_order_zero_reference(block.a1, block.big_a1, block.rhs)
    assert np.allclose(block.big_a0, reference, atol=1e-10)


def test_flat_factorization_symbol():
    surface = SurfaceState.build(SphFn.zeros(3), surface_grid(3))
    lam = build_factorization(surface, list(range(7))).symbol()
    for t in range(7):
        label = RepLabel(t)
        expected = flat_dn_multiplier(label) * np.eye(label.dim)
        assert np.allclose(lam.full(t), expected, atol=1e-10)


def test_unknown_symbol_part():
    surface = SurfaceState.build(SphFn.zeros(2), surface_grid(2))
    with pytest.raises(ValueError):
        build_factorization(surface, [0, 2]).symbol("bogus")


def test_paralinearized_on_unit_sphere_is_flat_multiplier():
    phi = SphFn.real_mode(4, 3, 2)
    result = paralinearized_dn(SphFn.zeros(4), phi)
    expected = phi * (math.sqrt(12.0) - 0.5)
    assert (result.value - expected).norm() <= 1e-8 * expected.norm()


def test_remainder_report_ratios():
    phi = SphFn.real_mode(3, 2, 0)
    report = remainder_report(phi, phi * 0.5)
    assert report["relative"] == pytest.approx(0.5)
    assert report["remainder_hs"] == pytest.approx(0.5 * phi.norm())


def _weighted_pairing(grid: SphereGrid, f: SphFn, g: SphFn, weight: np.ndarray) -> complex:
    return complex(grid.integrate(f.values(grid) * weight * np.conj(g.values(grid))))


def test_oracle_is_symmetric_for_the_surface_weight():
    rng = np.random.default_rng(21)
    zeta = (SphFn.random(2, rng) * 0.02).real_part()
    phi = SphFn.random(3, rng).real_part()
    psi = SphFn.random(3, rng).real_part()
    dphi = oracle_dn(zeta, phi, l_max=10).value
    dpsi = oracle_dn(zeta, psi, l_max=10).value
    grid = SphereGrid.for_band(24)
    weight = (1.0 + zeta.real_values(grid)) ** 2
    lhs = _weighted_pairing(grid, dphi, psi.resize(10), weight)
    rhs = _weighted_pairing(grid, phi.resize(10), dpsi, weight)
    assert abs(lhs - rhs) <= 1e-7 * max(abs(lhs), 1.0)


def test_good_unknown_on_unit_sphere():
    phi = SphFn.real_mode(4, 3, 1)
    dn_value = phi * 3.0
    good = good_unknown(SphFn.zeros(4), phi, dn_value)
    grid = surface_grid(4)
    assert np.allclose(good.b, dn_value.real_values(grid), atol=1e-12)
    for j in (1, 2, 3):
        assert np.allclose(good.v[j - 1], phi.frame_derivative(j).real_values(grid), atol=1e-12)
    assert (good.u - phi).norm() < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_good_unknown_on_round_sphere(n):
    c = 0.1
    phi = SphFn.real_mode(4, n, 1)
    dn_value = oracle_dn(_constant(4, c), phi).value
    good = good_unknown(_constant(4, c), phi, dn_value)
    grid = surface_grid(4)
    assert np.allclose(good.b, (phi * (n / (1.0 + c))).real_values(grid), atol=1e-9)
    for j in (1, 2, 3):
        expected = phi.frame_derivative(j).real_values(grid) / (1.0 + c) ** 2
        assert np.allclose(good.v[j - 1], expected, atol=1e-9)


@pytest.mark.parametrize("t", [2, 3, 4, 6])
def test_normalized_root_is_hermitian_positive_definite(t):
    surface = _perturbed_surface()
    lam1 = principal_root(surface, t) / surface.beta1[..., None, None]
    assert np.allclose(lam1, np.conj(np.swapaxes(lam1, -1, -2)), atol=1e-12)
    assert float(np.min(np.linalg.eigvalsh(lam1))) > 0.0


@pytest.mark.parametrize("t", [1, 2, 4])
def test_beta2_is_skew_hermitian(t):
    surface = _perturbed_surface()
    b2 = surface.beta2(t)
    assert np.allclose(b2 + np.conj(np.swapaxes(b2, -1, -2)), 0.0, atol=1e-12)
    square = b2 @ b2
    assert np.allclose(square, np.conj(np.swapaxes(square, -1, -2)), atol=1e-12)
    assert float(np.max(np.linalg.eigvalsh(square))) <= 1e-12


def _weighted_defect(zeta: SphFn, f: SphFn, g: SphFn) -> tuple[float, float]:
    l_max = f.l_max
    grid = surface_grid(l_max)
    surface = SurfaceState.build(zeta, grid)
    lam = build_factorization(surface, [2 * n for n in range(l_max + 1)]).symbol()
    chi = AdmissibleCutoff()

    def t_lambda(h: SphFn) -> SphFn:
        return project(para_op(lam, chi, lift(h), 2 * l_max), l_max)

    weight = (1.0 + zeta.real_values(grid)) ** 2
    lhs = _weighted_pairing(grid, t_lambda(f), g, weight)
    rhs = _weighted_pairing(grid, f, t_lambda(g), weight)
    return abs(lhs - rhs), f.norm(0.5) * g.norm(0.5)


def test_dn_symbol_is_nearly_self_adjoint_for_the_surface_weight():
    f = SphFn.real_mode(10, 3, 1) + SphFn.real_mode(10, 4, -2) * 0.5
    g = SphFn.real_mode(10, 3, 1) * 0.7 + SphFn.real_mode(10, 2, 0)
    flat, _ = _weighted_defect(SphFn.zeros(10), f, g)
    assert flat < 1e-10
    zeta = SphFn.real_mode(10, 2, 1, 0.01)
    defect, scale = _weighted_defect(zeta, f, g)
    assert defect <= 0.05 * scale


def test_depth_profile_is_flat_harmonic_extension():
    phi = SphFn.real_mode(3, 2, 0) + SphFn.real_mode(3, 3, 1)
    nodes = np.array([-0.5, -0.25, 0.0])
    profile = depth_profile(phi, nodes)
    assert (profile[-1] - phi).norm() < 1e-15
    expected = SphFn.real_mode(3, 2, 0) * 0.25 + SphFn.real_mode(3, 3, 1) * 0.125
    assert (profile[0] - expected).norm() < 1e-14


def test_factorization_residual_on_unit_sphere_is_quarter_profile():
    phi = SphFn.real_mode(4, 3, 1)
    result = factorization_residual(SphFn.zeros(4), phi, y_nodes=12)
    assert len(result.residual) == 12
    for r, w in zip(result.residual, result.profile):
        assert (r - w * 0.25).norm() <= 1e-8 * w.norm()
    assert result.relative() == pytest.approx(0.25, abs=1e-8)
    assert result.depth_error < 1e-4


def test_factorization_residual_deviation_scales_with_amplitude():
    phi = SphFn.real_mode(4, 3, 0)
    shape = SphFn.real_mode(4, 2, 0)
    flat = factorization_residual(SphFn.zeros(4), phi, y_nodes=10)
    deviations = []
    for eps in (1e-3, 2e-3):
        result = factorization_residual(shape * eps, phi, y_nodes=10)
        assert abs(result.relative() - 0.25) < 0.05
        deviations.append(
            max((r - r0).norm() for r, r0 in zip(result.residual, flat.residual))
        )
    assert deviations[0] > 0.0
    assert 1.8 < deviations[1] / deviations[0] < 4.2
