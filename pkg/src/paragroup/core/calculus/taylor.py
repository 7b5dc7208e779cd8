"""Taylor-adapted differential operators X^{(α)} for |α| ≤ 2.

The operators are fixed by the moment conditions X^{(α)} q̃^β(e) = δ_{αβ}, where
q̃(x) = q(x⁻¹) = −q(x).  Writing X^{(α)} = Σ_γ C[α, γ] Π^γ, the matrix C is the
inverse of M[γ, β] = Π^γ q̃^β(e).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from paragroup.core.calculus.diffops import (
    MultiIndex,
    apply_symbol_values,
    fundamental_values,
    sigma_power,
)
from paragroup.core.harmonic.grids import EulerGrid, SphereGrid
from paragroup.core.harmonic.representation import fundamental_tuple
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.harmonic.transform import evaluate
from paragroup.domain.errors import ConditioningError
from paragroup.domain.models import DIFF_TAGS, RepLabel

logger = logging.getLogger(__name__)


def multi_indices(order: int) -> tuple[MultiIndex, ...]:
    """All α ∈ ℕ³ with |α| ≤ order, graded by |α| then lexicographically descending."""
    out: list[MultiIndex] = []
    for total in range(order + 1):
        for a in range(total, -1, -1):
            for b in range(total - a, -1, -1):
                out.append((a, b, total - a - b))
    return tuple(out)


@dataclass(frozen=True, slots=True)
class TaylorOperators:
    indices: tuple[MultiIndex, ...]
    moments: np.ndarray
    coefficients: np.ndarray

    @property
    def order(self) -> int:
        return max(sum(a) for a in self.indices)

    def row(self, alpha: MultiIndex) -> list[tuple[MultiIndex, complex]]:
        i = self.indices.index(alpha)
        return [
            (gamma, complex(c))
            for gamma, c in zip(self.indices, self.coefficients[i])
            if abs(c) > 1e-13
        ]

    def symbol(self, alpha: MultiIndex, twice_l: int) -> np.ndarray:
        """σ[X^{(α)}](l) = Σ_γ C[α, γ] σ^γ(l)."""
        d = twice_l + 1
        out = np.zeros((d, d), dtype=complex)
        for gamma, c in self.row(alpha):
            out = out + c * sigma_power(gamma, twice_l)
        return out

    def apply(self, alpha: MultiIndex, a: SpectralFn) -> SpectralFn:
        return a.left_multiply(lambda label: self.symbol(alpha, label.twice_l))

    def apply_values(
        self,
        alpha: MultiIndex,
        grid: EulerGrid | SphereGrid,
        values: np.ndarray,
        twice_l_max: int | None = None,
    ) -> np.ndarray:
        if sum(alpha) == 0:
            return values
        return apply_symbol_values(
            grid, values, lambda label: self.symbol(alpha, label.twice_l), twice_l_max
        )

    def moment_residual(self) -> float:
        """max |C M − I|; zero up to round-off when the moment conditions hold."""
        size = len(self.indices)
        return float(np.max(np.abs(self.coefficients @ self.moments - np.eye(size))))


def _monomial(values: dict, beta: MultiIndex) -> np.ndarray:
    out = np.ones_like(values[DIFF_TAGS[0]])
    for tag, power in zip(DIFF_TAGS, beta):
        out = out * values[tag] ** power
    return out


def invert_moments(moments: np.ndarray, cond_threshold: float = 1e10) -> np.ndarray:
    condition = float(np.linalg.cond(moments))
    if not math.isfinite(condition) or condition > cond_threshold:
        raise ConditioningError(
            f"moment matrix condition number {condition:.3e} over {cond_threshold:.1e}"
        )
    return np.linalg.inv(moments)


@lru_cache(maxsize=None)
def taylor_operators(order: int = 2) -> TaylorOperators:
    indices = multi_indices(order)
    grid = EulerGrid.for_band(2 * order)
    q_tilde = {tag: -v for tag, v in fundamental_values(grid).items()}
    size = len(indices)
    moments = np.zeros((size, size), dtype=complex)
    for col, beta in enumerate(indices):
        spectrum = grid.forward(_monomial(q_tilde, beta), order)
        for row, gamma in enumerate(indices):
            # Π^γ g(e) = Σ (2l + 1) Tr(σ^γ(l) ĝ(l))
            moments[row, col] = sum(
                RepLabel(t).dim * np.trace(sigma_power(gamma, t) @ b)
                for t, b in spectrum.blocks.items()
            )
    coefficients = invert_moments(moments)
    logger.debug(f"[Taylor] built order {order} operators on {grid.ident}")
    return TaylorOperators(indices, moments, coefficients)


def taylor_polynomial(
    f: SpectralFn, x_angles: tuple[float, float, float], y: np.ndarray, order: int
) -> complex:
    """Σ_{|α| < order} q^α(y⁻¹) X^{(α)} f(x), the Taylor approximation of f(xy)."""
    ops = taylor_operators(max(order - 1, 0))
    q_inv = dict(zip(DIFF_TAGS, fundamental_tuple(np.asarray(y).conj().T)))
    total = 0.0 + 0.0j
    for alpha in ops.indices:
        if sum(alpha) >= order:
            continue
        coeff = 1.0 + 0.0j
        for tag, power in zip(DIFF_TAGS, alpha):
            coeff *= q_inv[tag] ** power
        total += coeff * complex(evaluate(ops.apply(alpha, f), *x_angles))
    return total
