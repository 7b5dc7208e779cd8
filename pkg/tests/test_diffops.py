from __future__ import annotations

import numpy as np
import pytest

from paragroup.core.calculus.diffops import (
    apply_pi,
    definitional_difference,
    multi_difference,
    rt_difference,
)
from paragroup.core.harmonic.grids import EulerGrid, GridFn
from paragroup.core.harmonic.representation import sigma
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.harmonic.transform import evaluate
from paragroup.domain.models import DIFF_TAGS, DiffTag


@pytest.mark.parametrize("nu", DIFF_TAGS)
@pytest.mark.parametrize("mu", DIFF_TAGS)
def test_difference_of_pi_symbol_is_kronecker(mu, nu):
    a = SpectralFn.from_multiplier(9, lambda label: sigma(nu, label))
    d = rt_difference(mu, a)
    for t in range(9):
        expected = np.eye(t + 1) if mu is nu else np.zeros((t + 1, t + 1))
        assert np.allclose(d.block(t), expected, atol=1e-12)


@pytest.mark.parametrize("tag", DIFF_TAGS)
def test_stencil_matches_definition(tag):
    rng = np.random.default_rng(0)
    band = 6
    grid = EulerGrid.for_band(14)
    a = SpectralFn.random(band, rng)
    oracle = definitional_difference(tag, GridFn(grid, grid.inverse(a)), band)
    stencil = rt_difference(tag, a)
    for t in range(band + 1):
        assert np.allclose(stencil.block(t), oracle.block(t), atol=1e-10)


def test_top_block_is_flagged_truncated():
    rng = np.random.default_rng(1)
    assert rt_difference(DiffTag.PLUS, SpectralFn.random(4, rng)).truncated


def test_differences_commute():
    rng = np.random.default_rng(2)
    a = SpectralFn.random(8, rng)
    left = multi_difference((1, 1, 0), a)
    right = rt_difference(DiffTag.PLUS, rt_difference(DiffTag.MINUS, a))
    for t in range(7):
        assert np.allclose(left.block(t), right.block(t), atol=1e-12)


def test_pi_zero_is_psi_derivative():
    rng = np.random.default_rng(3)
    a = SpectralFn.random(5, rng)
    pi0 = apply_pi(DiffTag.ZERO, a)
    phi, theta, psi, h = 0.7, 1.2, -0.4, 1e-5
    fd = (evaluate(a, phi, theta, psi + h) - evaluate(a, phi, theta, psi - h)) / (2 * h)
    exact = evaluate(pi0, phi, theta, psi)
    assert abs(complex(1j * fd - exact)) < 1e-6 * max(1.0, abs(complex(exact)))
