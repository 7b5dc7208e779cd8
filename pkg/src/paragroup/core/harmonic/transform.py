from __future__ import annotations

import logging

import numpy as np

from paragroup.core.harmonic.grids import EulerGrid, GridFn, SphereGrid
from paragroup.core.harmonic.representation import wigner_matrix
from paragroup.core.harmonic.spectral import SpectralFn

logger = logging.getLogger(__name__)


def forward(f: GridFn, twice_l_max: int) -> SpectralFn:
    """f̂(l) = ∫ f(x) T^l(x)* dx for 2l ≤ twice_l_max."""
    return f.grid.forward(f.values, twice_l_max)


def inverse(a: SpectralFn, grid: EulerGrid | SphereGrid) -> GridFn:
    """f(x) = Σ_l (2l + 1) Tr(f̂(l) T^l(x)) sampled on the grid."""
    return GridFn(grid, grid.inverse(a))


def evaluate(
    a: SpectralFn,
    phi: np.ndarray | float,
    theta: np.ndarray | float,
    psi: np.ndarray | float,
) -> np.ndarray:
    """Fourier series evaluated at arbitrary (broadcast) Euler angles; unbatched spectra only."""
    out = 0.0
    for t, block in a.blocks.items():
        wig = wigner_matrix(t, phi, theta, psi)
        out = out + (t + 1) * np.einsum("ij,...ji->...", block, wig)
    return np.asarray(out, dtype=complex)


def plancherel_defect(f: GridFn, a: SpectralFn) -> float:
    """|∫|f|² − Σ(2l+1)‖f̂(l)‖²_HS| relative to ∫|f|²."""
    physical = float(np.real(f.grid.integrate(np.abs(f.values) ** 2)))
    spectral = a.sobolev_norm(0.0) ** 2
    return abs(physical - spectral) / max(physical, 1e-300)


def convolve_quadrature(f: GridFn, g: SpectralFn) -> np.ndarray:
    """(f ∗ g)(x) = ∫ f(y) g(y⁻¹x) dy at the grid nodes, by direct quadrature.

    Quadratic in the number of nodes; only meant for cross-checking spectral identities.
    """
    grid = f.grid
    if not isinstance(grid, EulerGrid):
        raise TypeError("convolution is defined on SU(2) grids")
    phi, theta, psi = grid.points()
    nodes = wigner_matrix(1, phi, theta, psi).reshape(-1, 2, 2)
    weights = grid.weights().reshape(-1)
    fvals = f.values.reshape(-1)
    out = np.zeros(nodes.shape[0], dtype=complex)
    for k, y in enumerate(nodes):
        if weights[k] * abs(fvals[k]) == 0.0:
            continue
        shifted = y.conj().T @ nodes
        angles = _euler_of_matrices(shifted)
        out += weights[k] * fvals[k] * evaluate(g, *angles)
    return out.reshape(grid.shape)


def _euler_of_matrices(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized Euler angles of stacked SU(2) matrices; valid off the chart boundary."""
    a = u[..., 0, 0]
    b = u[..., 0, 1]
    theta = 2.0 * np.arctan2(np.abs(b), np.abs(a))
    arg_a = np.angle(a)
    arg_b = np.angle(b)
    phi = arg_a + arg_b - np.pi / 2.0
    psi = arg_a - arg_b + np.pi / 2.0
    return phi, theta, psi

