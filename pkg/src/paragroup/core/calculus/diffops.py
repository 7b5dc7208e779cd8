"""Left-invariant derivatives Π₊, Π₋, Π₀ and the difference operators 𝐃₊, 𝐃₋, 𝐃₀.

𝐃_q acts on Fourier coefficients as multiplication of the kernel by q, where
(q₊, q₋, q₀) = (T^{1/2}_{1/2,−1/2}, T^{1/2}_{−1/2,1/2}, T^{1/2}_{−1/2,−1/2} − T^{1/2}_{1/2,1/2}).
The closed-form stencils couple block l to blocks l ± 1/2 only.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping

import numpy as np

from paragroup.core.harmonic.grids import EulerGrid, GridFn, SphereGrid
from paragroup.core.harmonic.representation import sigma, wigner_matrix
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.domain.models import DIFF_TAGS, DiffTag, RepLabel

MultiIndex = tuple[int, int, int]


def apply_pi(tag: DiffTag, a: SpectralFn) -> SpectralFn:
    """(Π_tag f)^(l) = σ_tag(l) f̂(l)."""
    return a.left_multiply(lambda label: sigma(tag, label))


def sigma_power(gamma: MultiIndex, twice_l: int) -> np.ndarray:
    """σ₊^{γ₁} σ₋^{γ₂} σ₀^{γ₃}, the symbol of Π^γ in normal order."""
    out = np.eye(twice_l + 1, dtype=complex)
    for tag, power in zip(DIFF_TAGS, gamma):
        for _ in range(power):
            out = out @ sigma(tag, twice_l)
    return out


def block_stencil(
    tag: DiffTag, twice_l: int, lower: np.ndarray | None, upper: np.ndarray | None
) -> np.ndarray:
    d = twice_l + 1
    tl = float(twice_l)
    ref = lower if lower is not None else upper
    xshape = ref.shape[:-2] if ref is not None else ()
    pm = np.zeros((*xshape, d + 1, d + 1), dtype=complex)
    if lower is not None:
        pm[..., 1:d, 1:d] = lower
    ap = upper if upper is not None else np.zeros((*xshape, d + 1, d + 1), dtype=complex)
    tn = (2.0 * np.arange(d) - tl)[:, None]
    tm = (2.0 * np.arange(d) - tl)[None, :]

    def c(x: np.ndarray) -> np.ndarray:
        return 0.5 * np.sqrt(np.clip(x, 0.0, None))

    if tag is DiffTag.PLUS:
        out = c((tl + tm) * (tl - tn)) * pm[..., 1:, :d] - c(
            (tl - tm + 2) * (tl + tn + 2)
        ) * ap[..., 1:, :d]
    elif tag is DiffTag.MINUS:
        out = c((tl - tm) * (tl + tn)) * pm[..., :d, 1:] - c(
            (tl + tm + 2) * (tl - tn + 2)
        ) * ap[..., :d, 1:]
    else:
        out = (
            c((tl - tm) * (tl - tn)) * pm[..., 1:, 1:]
            + c((tl + tm + 2) * (tl + tn + 2)) * ap[..., 1:, 1:]
            - c((tl + tm) * (tl + tn)) * pm[..., :d, :d]
            - c((tl - tm + 2) * (tl - tn + 2)) * ap[..., :d, :d]
        )
    return out / (tl + 1.0)


def difference_blocks(
    tag: DiffTag, blocks: Mapping[int, np.ndarray], twice_l_max: int
) -> tuple[dict[int, np.ndarray], bool]:
    """Apply 𝐃_tag blockwise; blocks may carry leading (x-dependent) axes.

    Returns the new blocks for 0 ≤ 2l ≤ twice_l_max and whether any needed
    neighbour above twice_l_max was taken as zero.
    """
    out: dict[int, np.ndarray] = {}
    truncated = False
    for t in range(twice_l_max + 1):
        lower = blocks.get(t - 1) if t > 0 else None
        upper = blocks.get(t + 1) if t + 1 <= twice_l_max else None
        if t + 1 > twice_l_max:
            truncated = True
        if lower is None and upper is None:
            continue
        out[t] = block_stencil(tag, t, lower, upper)
    return out, truncated


def rt_difference(tag: DiffTag, a: SpectralFn) -> SpectralFn:
    blocks, truncated = difference_blocks(DiffTag(tag), a.blocks, a.twice_l_max)
    return SpectralFn(a.twice_l_max, blocks, truncated=truncated or a.truncated)


def multi_difference(alpha: MultiIndex, a: SpectralFn) -> SpectralFn:
    """𝐃^α = 𝐃₊^{α₁} 𝐃₋^{α₂} 𝐃₀^{α₃}; the factors commute."""
    out = a
    for tag, power in zip(DIFF_TAGS, alpha):
        for _ in range(power):
            out = rt_difference(tag, out)
    return out


def fundamental_values(grid: EulerGrid) -> dict[DiffTag, np.ndarray]:
    """q₊, q₋, q₀ sampled on an SU(2) grid."""
    phi, theta, psi = grid.points()
    half = wigner_matrix(1, phi, theta, psi)
    x1, x2 = half[..., 0, 0], half[..., 0, 1]
    return {
        DiffTag.PLUS: -np.conj(x2),
        DiffTag.MINUS: x2,
        DiffTag.ZERO: x1 - np.conj(x1),
    }


def definitional_difference(tag: DiffTag, f: GridFn, twice_l_max: int) -> SpectralFn:
    """(q_tag f)^, the defining property of 𝐃_tag; used as an oracle."""
    if not isinstance(f.grid, EulerGrid):
        raise TypeError("difference oracle needs an SU(2) grid")
    q = fundamental_values(f.grid)[DiffTag(tag)]
    values = q.reshape(q.shape + (1,) * (f.values.ndim - 3)) * f.values
    return f.grid.forward(values, twice_l_max)


def apply_symbol_values(
    grid: EulerGrid | SphereGrid,
    values: np.ndarray,
    matrix: Callable[[RepLabel], np.ndarray],
    twice_l_max: int | None = None,
) -> np.ndarray:
    """Apply the invariant operator with symbol `matrix` to grid samples (x-derivatives)."""
    if isinstance(grid, SphereGrid):
        return grid.apply_columns(values, matrix, None if twice_l_max is None else twice_l_max // 2)
    top = grid.exactness if twice_l_max is None else twice_l_max
    return grid.inverse(grid.forward(values, top).left_multiply(matrix))


def apply_pi_values(
    tag: DiffTag, grid: EulerGrid | SphereGrid, values: np.ndarray, twice_l_max: int | None = None
) -> np.ndarray:
    return apply_symbol_values(grid, values, lambda label: sigma(tag, label), twice_l_max)
