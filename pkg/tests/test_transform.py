from __future__ import annotations

import math

import numpy as np
import pytest

from paragroup.core.harmonic.grids import EulerGrid, GridFn, SphereGrid
from paragroup.core.harmonic.io import (
    load_spectral,
    save_spectral,
    spectral_to_dict,
    write_grid_csv,
)
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.harmonic.transform import (
    convolve_quadrature,
    evaluate,
    forward,
    inverse,
    plancherel_defect,
)
from paragroup.domain.errors import GridResolutionError, IndexRangeError


def test_euler_grid_exactness():
    grid = EulerGrid.for_band(8)
    assert grid.shape == (9, 5, 17)
    assert grid.exactness == 8
    assert grid.weights().sum() == pytest.approx(1.0)


def test_forward_inverse_roundtrip_and_plancherel():
    rng = np.random.default_rng(0)
    grid = EulerGrid.for_band(8)
    a = SpectralFn.random(8, rng)
    f = inverse(a, grid)
    back = forward(f, 8)
    for t in range(9):
        assert np.allclose(back.block(t), a.block(t), atol=1e-10)
    assert plancherel_defect(f, back) < 1e-10


def test_forward_rejects_band_above_exactness():
    grid = EulerGrid.for_band(4)
    values = np.zeros(grid.shape, dtype=complex)
    with pytest.raises(GridResolutionError):
        grid.forward(values, 6)


def test_grid_fn_rejects_wrong_shape():
    with pytest.raises(GridResolutionError):
        GridFn(EulerGrid.for_band(4), np.zeros((2, 2, 2)))


def test_evaluate_matches_grid_samples():
    rng = np.random.default_rng(1)
    grid = EulerGrid.for_band(6)
    a = SpectralFn.random(5, rng)
    values = grid.inverse(a)
    i, j, k = 2, 1, 7
    direct = evaluate(a, grid.phi[i], grid.theta[j], grid.psi[k])
    assert complex(direct) == pytest.approx(complex(values[i, j, k]), abs=1e-10)


def test_convolution_multiplies_fourier_blocks():
    rng = np.random.default_rng(11)
    grid = EulerGrid.for_band(4)
    f_hat = SpectralFn.random(2, rng)
    g_hat = SpectralFn.random(2, rng)
    f = inverse(f_hat, grid)
    product = forward(GridFn(grid, convolve_quadrature(f, g_hat)), 2)
    for t in range(3):
        assert np.allclose(product.block(t), g_hat.block(t) @ f_hat.block(t), atol=1e-10)


def test_convolution_needs_su2_grid():
    grid = SphereGrid.for_band(4)
    with pytest.raises(TypeError):
        convolve_quadrature(GridFn(grid, np.zeros(grid.shape, dtype=complex)), SpectralFn.zeros(2))


def test_constant_function_has_only_trivial_block():
    grid = EulerGrid.for_band(4)
    spectrum = grid.forward(np.full(grid.shape, 3.0 + 0j), 4)
    assert spectrum.block(0)[0, 0] == pytest.approx(3.0)
    for t in range(1, 5):
        assert np.allclose(spectrum.block(t), 0.0, atol=1e-12)


def test_sobolev_norm_weights_by_dimension_and_size():
    a = SpectralFn(2, {2: np.eye(3, dtype=complex)})
    # dim 3, ⟨1⟩² = 3, three unit entries
    assert a.sobolev_norm(0.0) == pytest.approx(3.0)
    assert a.sobolev_norm(0.5) == pytest.approx(math.sqrt(27.0))
    assert a.sobolev_norm(1.0) == pytest.approx(9.0)


def test_spectral_fn_rejects_bad_block():
    with pytest.raises(IndexRangeError):
        SpectralFn(2, {3: np.zeros((4, 4))})
    with pytest.raises(IndexRangeError):
        SpectralFn(2, {1: np.zeros((3, 3))})


def test_spectral_arithmetic():
    rng = np.random.default_rng(2)
    a = SpectralFn.random(3, rng)
    b = SpectralFn.random(3, rng)
    c = (a + b) - b
    for t in range(4):
        assert np.allclose(c.block(t), a.block(t))
    assert np.allclose((2.0 * a).block(2), 2.0 * a.block(2))


def test_sphere_grid_exactness():
    grid = SphereGrid.for_band(12)
    assert grid.shape == (7, 13)
    assert grid.exactness == 12
    assert grid.weights().sum() == pytest.approx(1.0)


def test_spectral_json_layout(tmp_path):
    a = SpectralFn(1, {0: np.array([[1.0 + 2.0j]])})
    assert spectral_to_dict(a) == {"twice_l_max": 1, "blocks": {"0": [1.0, 2.0]}}

    rng = np.random.default_rng(3)
    b = SpectralFn.random(4, rng)
    path = tmp_path / "spectral.json"
    save_spectral(path, b)
    loaded = load_spectral(path)
    for t in range(5):
        assert np.allclose(loaded.block(t), b.block(t))


def test_grid_csv_has_one_row_per_node(tmp_path):
    grid = SphereGrid.for_band(4)
    path = tmp_path / "grid.csv"
    write_grid_csv(path, GridFn(grid, np.ones(grid.shape, dtype=complex)))
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "theta,phi,psi,re,im"
    assert len(lines) == 1 + grid.n_theta * grid.n_psi
