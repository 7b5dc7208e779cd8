from __future__ import annotations

import numpy as np
import pytest

from paragroup.core.calculus.diffops import apply_pi
from paragroup.core.calculus.orders import adjoint_residuals, composition_residuals, unit_input
from paragroup.core.calculus.symbols import (
    Symbol,
    adjoint_symbol,
    apply,
    compose,
    grid_from_ident,
    hermitian_function,
    quantize,
    symbol_from_dict,
    symbol_norm,
    symbol_of,
    symbol_to_dict,
    x_independent,
)
from paragroup.core.calculus.taylor import taylor_operators
from paragroup.core.harmonic.grids import EulerGrid, SphereGrid
from paragroup.core.harmonic.representation import sigma
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.domain.errors import IndexRangeError
from paragroup.domain.models import DIFF_TAGS, DiffTag, RepLabel

GRID = EulerGrid.for_band(12)


def test_invariant_composition_is_matrix_product():
    rng = np.random.default_rng(0)
    a = x_independent(GRID, SpectralFn.random(6, rng))
    b = x_independent(GRID, SpectralFn.random(6, rng))
    composed = compose(a, b, 2)
    assert composed.labels == list(range(5))
    for t in composed.labels:
        assert np.allclose(composed.blocks[t], a.blocks[t] @ b.blocks[t], atol=1e-12)


def test_invariant_adjoint_is_conjugate_transpose():
    rng = np.random.default_rng(1)
    a = x_independent(GRID, SpectralFn.random(6, rng))
    adjoint = adjoint_symbol(a, 2)
    for t in adjoint.labels:
        assert np.allclose(adjoint.blocks[t], a.blocks[t].conj().T, atol=1e-12)


def test_quantization_of_invariant_symbol_is_multiplier():
    rng = np.random.default_rng(2)
    a = x_independent(GRID, SpectralFn.random(6, rng))
    f = SpectralFn.random(6, rng)
    out = apply(a, f)
    expected = f.left_multiply(lambda label: a.blocks[label.twice_l])
    for t in range(7):
        assert np.allclose(out.block(t), expected.block(t), atol=1e-10)


@pytest.mark.parametrize("tag", DIFF_TAGS)
def test_first_order_composition_with_field_is_leibniz(tag):
    rng = np.random.default_rng(3)
    ops = taylor_operators(2)
    f = SpectralFn.random(4, rng)
    c_values = GRID.inverse(SpectralFn.random(2, rng))
    labels = list(range(6))
    field = Symbol.scalar_field(GRID, c_values, lambda label: np.eye(label.dim), labels)
    left = quantize(compose(Symbol.from_pi(GRID, tag, labels), field, 1, ops), f)
    right = GRID.inverse(apply_pi(tag, GRID.forward(c_values * GRID.inverse(f), 6)))
    assert np.allclose(left, right, atol=1e-9)


def test_symbol_of_recovers_pi_symbol():
    grid = EulerGrid.for_band(4)
    recovered = symbol_of(lambda spec: grid.inverse(apply_pi(DiffTag.PLUS, spec)), grid, 4)
    for t in range(5):
        assert np.allclose(recovered.blocks[t], sigma(DiffTag.PLUS, t), atol=1e-10)


def test_symbol_norm_of_identity():
    assert symbol_norm(Symbol.identity(GRID, range(5)), 0, 0, 0.0) == pytest.approx(1.0)


def test_symbol_dict_roundtrip():
    rng = np.random.default_rng(4)
    a = x_independent(SphereGrid(3, 5), SpectralFn.random(3, rng), order=1.0)
    back = symbol_from_dict(symbol_to_dict(a))
    assert back.grid == a.grid
    assert back.order == 1.0
    for t in a.labels:
        assert np.allclose(back.blocks[t], a.blocks[t])


def test_grid_from_ident():
    assert grid_from_ident("sphere:3x5") == SphereGrid(3, 5)
    assert grid_from_ident("euler:5x3x9") == EulerGrid(5, 3, 9)
    with pytest.raises(ValueError):
        grid_from_ident("torus:3x3")


def test_compose_rejects_high_order():
    a = Symbol.identity(GRID, range(4))
    with pytest.raises(ValueError):
        compose(a, a, 3)


def test_quantize_requires_symbol_blocks():
    rng = np.random.default_rng(5)
    a = Symbol.identity(GRID, range(2))
    with pytest.raises(IndexRangeError):
        quantize(a, SpectralFn.random(4, rng))


def test_hermitian_square_root():
    blocks = {t: (RepLabel(t).casimir + 1.0) * np.eye(t + 1) for t in range(4)}
    a = Symbol(GRID, blocks)
    root = hermitian_function(a, np.sqrt)
    for t in range(4):
        assert np.allclose(root.blocks[t] @ root.blocks[t], blocks[t])


def _residual_setup(seed: int):
    rng = np.random.default_rng(seed)
    t, band = 4, 2
    grid = EulerGrid.for_band(t + band)
    multiplier = SpectralFn.from_multiplier(
        t + band + 3,
        lambda label: label.size * np.eye(label.dim) + 0.5j * sigma(DiffTag.ZERO, label),
    )
    field = SpectralFn.random(band, rng)
    return t, band, grid, multiplier, field


def _grid_norm(grid: EulerGrid, values: np.ndarray) -> float:
    return float(np.sqrt(np.real(grid.integrate(np.abs(values) ** 2))))


@pytest.mark.parametrize("r", [0, 1, 2])
def test_composition_residuals_match_compose(r):
    ops = taylor_operators(2)
    t, band, grid, multiplier, field = _residual_setup(11)
    residuals = composition_residuals(multiplier, field, [t], ops, np.random.default_rng(5), grid)

    f = unit_input(t, np.random.default_rng(5))
    c = grid.inverse(field)
    product = grid.forward(c * grid.inverse(f), t + band)
    exact = grid.inverse(product.left_multiply(lambda label: multiplier.block(label.twice_l)))
    b = Symbol.scalar_field(grid, c, lambda label: np.eye(label.dim), [t])
    expansion = quantize(compose(x_independent(grid, multiplier, 1.0), b, r, ops), f)
    expected = _grid_norm(grid, exact - expansion)
    assert residuals[r, 0] == pytest.approx(expected, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("r", [0, 1, 2])
def test_adjoint_residuals_match_adjoint_symbol(r):
    ops = taylor_operators(2)
    t, band, grid, multiplier, field = _residual_setup(12)
    residuals = adjoint_residuals(multiplier, field, [t], ops, np.random.default_rng(6), grid)

    f = unit_input(t, np.random.default_rng(6))
    c = grid.inverse(field)
    product = grid.forward(np.conj(c) * grid.inverse(f), t + band)
    exact = grid.inverse(
        product.left_multiply(lambda label: multiplier.block(label.twice_l).conj().T)
    )
    a = Symbol.scalar_field(
        grid, c, lambda label: multiplier.block(label.twice_l), range(t + 4), order=1.0
    )
    expansion = quantize(adjoint_symbol(a, r, ops), f)
    expected = _grid_norm(grid, exact - expansion)
    assert residuals[r, 0] == pytest.approx(expected, rel=1e-8, abs=1e-10)
