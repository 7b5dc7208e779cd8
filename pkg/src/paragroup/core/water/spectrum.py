"""Frequency fits for small-amplitude oscillations of single surface modes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from paragroup.core.harmonic.spherical import SphFn
from paragroup.core.water.waves import WaveState, WaveSystem, linear_frequency

logger = logging.getLogger(__name__)


def zero_crossings(series: np.ndarray, dt: float) -> np.ndarray:
    """Linearly interpolated sign changes of a mean-free series."""
    x = np.asarray(series, dtype=float)
    x = x - float(np.mean(x))
    idx = np.nonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))[0]
    idx = idx[x[idx] != x[idx + 1]]
    frac = x[idx] / (x[idx] - x[idx + 1])
    return (idx + frac) * dt


def fit_frequency(series: np.ndarray, dt: float) -> float:
    """Angular frequency from a least-squares line through successive zero crossings."""
    crossings = zero_crossings(series, dt)
    if len(crossings) < 3:
        raise ValueError(f"need at least three zero crossings, found {len(crossings)}")
    k = np.arange(len(crossings), dtype=float)
    half_period = np.polyfit(k, crossings, 1)[0]
    return math.pi / half_period


@dataclass(frozen=True, slots=True)
class ModeFit:
    n: int
    expected: float
    fitted: float
    samples: int

    @property
    def relative_error(self) -> float:
        return abs(self.fitted - self.expected) / self.expected


def mode_oscillation(
    system: WaveSystem, n: int, *, amplitude: float = 1e-3, periods: float = 3.0, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Evolve (amplitude·Y_n^0, 0) and record the Y_n^0 coefficient of ζ."""
    if not 2 <= n <= system.l_max:
        raise ValueError(f"mode degree must lie in [2, {system.l_max}], got {n}")
    zeta = SphFn.real_mode(system.l_max, n, 0, amplitude)
    state = WaveState(zeta, SphFn.zeros(system.l_max))
    steps = int(math.ceil(periods * 2.0 * math.pi / linear_frequency(n) / dt))
    times, values = [], []
    for s in system.run(state, dt, steps):
        times.append(s.t)
        values.append(s.zeta.get(n, 0).real)
    return np.asarray(times), np.asarray(values)


def fit_mode(
    system: WaveSystem, n: int, *, amplitude: float = 1e-3, periods: float = 3.0, dt: float
) -> ModeFit:
    _, values = mode_oscillation(system, n, amplitude=amplitude, periods=periods, dt=dt)
    fitted = fit_frequency(values, dt)
    fit = ModeFit(n, linear_frequency(n), fitted, len(values))
    logger.info(
        f"[Waves] mode n={n}: fitted {fitted:.5f} vs {fit.expected:.5f} "
        f"({100 * fit.relative_error:.2f}%)"
    )
    return fit
