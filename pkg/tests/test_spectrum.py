from __future__ import annotations

import numpy as np
import pytest

from paragroup.core.water.spectrum import ModeFit, fit_frequency, mode_oscillation, zero_crossings
from paragroup.core.water.waves import WaveSystem


def test_fit_frequency_of_cosine():
    dt = 1e-3
    omega = 2.5
    t = np.arange(0.0, 4.0 * 2.0 * np.pi / omega, dt)
    fitted = fit_frequency(np.cos(omega * t + 0.3), dt)
    assert fitted == pytest.approx(omega, rel=1e-3)


def test_zero_crossings_are_interpolated():
    series = np.array([1.0, -1.0, 1.0, -1.0])
    assert np.allclose(zero_crossings(series, 0.5), [0.25, 0.75, 1.25])


def test_fit_frequency_needs_three_crossings():
    with pytest.raises(ValueError):
        fit_frequency(np.linspace(0.0, 1.0, 50), 0.1)


def test_mode_degree_range():
    system = WaveSystem(l_max=3)
    with pytest.raises(ValueError):
        mode_oscillation(system, 1, dt=1e-3)
    with pytest.raises(ValueError):
        mode_oscillation(system, 4, dt=1e-3)


def test_mode_fit_relative_error():
    fit = ModeFit(n=2, expected=2.0, fitted=2.1, samples=10)
    assert fit.relative_error == pytest.approx(0.05)
