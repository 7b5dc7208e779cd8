"""Admissible cutoffs, paradifferential operators T_a, paraproducts and Bony's paralinearization."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from paragroup.core.calculus.littlewood_paley import (
    DEFAULT_FAMILY,
    CutoffFamily,
    band_piece,
    max_frequency,
    partial_sum,
)
from paragroup.core.calculus.symbols import Symbol, apply
from paragroup.core.harmonic.grids import EulerGrid, SphereGrid
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.domain.errors import AdmissibilityError, ParagroupError
from paragroup.domain.models import CutoffRule, RepLabel

logger = logging.getLogger(__name__)

Grid = EulerGrid | SphereGrid


@dataclass(frozen=True, slots=True)
class AdmissibleCutoff:
    """χ(μ, λ) with χ = 0 for μ ≥ δ⟨λ⟩; μ is the x-frequency, λ the symbol frequency."""

    delta: float = 0.25
    rule: CutoffRule = CutoffRule.SHARP
    family: CutoffFamily = DEFAULT_FAMILY

    def __post_init__(self) -> None:
        if not (0.0 < self.delta < 0.5):
            raise AdmissibilityError(f"delta must lie in (0, 1/2), got {self.delta}")

    def __call__(self, mu: np.ndarray | float, lam: np.ndarray | float) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        lam = np.asarray(lam, dtype=float)
        if self.rule is CutoffRule.SHARP:
            return self.family.phi(mu / (self.delta * np.sqrt(1.0 + lam**2)))
        t_max = 2.0 * float(np.max(np.abs(lam), initial=1.0)) + 2.0
        nodes, weights = self.family.quadrature(t_max)
        tail = sum(
            w * self.family.phi(2.0 * mu / (self.delta * t)) * self.family.psi(lam / t)
            for t, w in zip(nodes, weights)
        )
        return self.family.phi(lam) * self.family.phi(2.0 * mu / self.delta) + tail

    def violations(self, mu: np.ndarray, lam: np.ndarray, tol: float = 1e-12) -> int:
        """Count sample points where χ ≠ 0 although μ ≥ δ⟨λ⟩."""
        mu, lam = np.broadcast_arrays(np.asarray(mu, dtype=float), np.asarray(lam, dtype=float))
        outside = mu >= self.delta * np.sqrt(1.0 + lam**2)
        return int(np.count_nonzero(np.abs(self(mu, lam))[outside] > tol))


def regularize(a: Symbol, chi: AdmissibleCutoff) -> Symbol:
    """a^χ: the x-spectrum of block l is multiplied by χ(|η|, |ξ_l|)."""

    def one(label: RepLabel, block: np.ndarray) -> np.ndarray:
        if block.ndim == 2:
            return block
        lam = label.frequency
        return a.grid.filter_values(block, lambda eta: float(chi(eta.frequency, lam)))

    return a.map(one)


def spectral_parameter(a: Symbol, tol: float = 1e-10) -> float:
    """Largest |η|/⟨l⟩ over x-modes carrying mass above tol relative to the block."""
    worst = 0.0
    for t in a.labels:
        if a.is_constant(t):
            continue
        spectrum = a.x_spectrum(t)
        masses = {k: float(np.max(np.abs(b))) for k, b in spectrum.blocks.items()}
        peak = max(masses.values(), default=0.0)
        size = RepLabel(t).size
        for k, mass in masses.items():
            if mass > tol * max(peak, 1e-300):
                worst = max(worst, RepLabel(k).frequency / size)
    return worst


def para_op(a: Symbol, chi: AdmissibleCutoff, f: SpectralFn, twice_l_max: int | None = None):
    """T_a f = Op(a^χ) f, returned as Fourier coefficients."""
    return apply(regularize(a, chi), f, twice_l_max)


def _values(grid: Grid, a: SpectralFn) -> np.ndarray:
    return grid.inverse(a)


def paraproduct_integrand(
    a: SpectralFn,
    u: SpectralFn,
    t: float,
    grid: Grid,
    *,
    gap_log2: float = 10.0,
    family: CutoffFamily = DEFAULT_FAMILY,
) -> np.ndarray:
    """φ(2^{gap}|∇|/t) a · ψ(|∇|/t) u on the grid."""
    low = partial_sum(a, t * 2.0 ** (-gap_log2), family)
    return _values(grid, low) * _values(grid, band_piece(u, t, family))


def paraproduct(
    a: SpectralFn,
    u: SpectralFn,
    grid: Grid,
    *,
    gap_log2: float = 10.0,
    family: CutoffFamily = DEFAULT_FAMILY,
    twice_l_max: int | None = None,
) -> SpectralFn:
    """T_a u = ∫₁^∞ φ(2^{gap}|∇|/t) a · ψ(|∇|/t) u dt/t."""
    top = u.twice_l_max if twice_l_max is None else twice_l_max
    t_max = 2.0 * max(max_frequency(u), 1.0)
    nodes, weights = family.quadrature(t_max)
    total = np.zeros(grid.shape, dtype=complex)
    for t, w in zip(nodes, weights):
        total += w * paraproduct_integrand(a, u, float(t), grid, gap_log2=gap_log2, family=family)
    return grid.forward(total, top)


@dataclass(frozen=True, slots=True)
class ParaproductReport:
    t_au: SpectralFn
    t_ua: SpectralFn
    low: SpectralFn
    remainder: SpectralFn

    def norms(self, s: float = 0.0) -> dict[str, float]:
        return {
            "t_au": self.t_au.sobolev_norm(s),
            "t_ua": self.t_ua.sobolev_norm(s),
            "low": self.low.sobolev_norm(s),
            "remainder": self.remainder.sobolev_norm(s),
        }


def decomposition_report(
    a: SpectralFn,
    u: SpectralFn,
    grid: Grid,
    *,
    gap_log2: float = 10.0,
    family: CutoffFamily = DEFAULT_FAMILY,
    twice_l_max: int | None = None,
) -> ParaproductReport:
    """au = T_a u + T_u a + φ(|∇|)a·φ(|∇|)u + R(a, u)."""
    top = max(a.twice_l_max, u.twice_l_max) if twice_l_max is None else twice_l_max
    product = grid.forward(_values(grid, a) * _values(grid, u), top)
    t_au = paraproduct(a, u, grid, gap_log2=gap_log2, family=family, twice_l_max=top)
    t_ua = paraproduct(u, a, grid, gap_log2=gap_log2, family=family, twice_l_max=top)
    low_values = _values(grid, partial_sum(a, 1.0, family)) * _values(
        grid, partial_sum(u, 1.0, family)
    )
    low = grid.forward(low_values, top)
    remainder = product - t_au - t_ua - low
    return ParaproductReport(t_au, t_ua, low, remainder)


@dataclass(frozen=True, slots=True)
class BonyReport:
    paralinear: SpectralFn
    quadrature_defect: float
    remainder: SpectralFn

    def remainder_norm(self, s: float = 0.0) -> float:
        return self.remainder.sobolev_norm(s)


def _checked(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, name: str) -> np.ndarray:
    try:
        out = np.asarray(fn(x))
    except Exception as exc:
        raise ParagroupError(f"{name} failed on the range of u: {exc}", reason="bony_eval") from exc
    if not np.all(np.isfinite(out)):
        raise ParagroupError(f"{name} is not finite on the range of u", reason="bony_eval")
    return out


def bony_paralinearize(
    F: Callable[[np.ndarray], np.ndarray],
    dF: Callable[[np.ndarray], np.ndarray],
    u: SpectralFn,
    grid: Grid,
    *,
    gap_log2: float = 10.0,
    family: CutoffFamily = DEFAULT_FAMILY,
    twice_l_max: int | None = None,
) -> BonyReport:
    """F(u) − F(u₁) = Op(l_u) u with l_u(x, ξ) = ∫ F′(u_t(x)) ψ(|ξ|/t) dt/t, u_t = φ(|∇|/t)u.

    Also reports R = F(u) − F(u₁) − T_{F′(u)} u.
    """
    top = u.twice_l_max if twice_l_max is None else twice_l_max
    u_values = _values(grid, u)
    u1_values = _values(grid, partial_sum(u, 1.0, family))
    lhs = _checked(F, u_values, "F") - _checked(F, u1_values, "F")
    t_max = 2.0 * max(max_frequency(u), 1.0)
    nodes, weights = family.quadrature(t_max)
    op = np.zeros(grid.shape, dtype=complex)
    for t, w in zip(nodes, weights):
        u_t = _values(grid, partial_sum(u, float(t), family))
        op += w * _checked(dF, u_t, "F'") * _values(grid, band_piece(u, float(t), family))
    weights_grid = grid.weights()
    lhs_norm = float(np.sqrt(np.sum(weights_grid * np.abs(lhs) ** 2)))
    defect_norm = float(np.sqrt(np.sum(weights_grid * np.abs(lhs - op) ** 2)))
    defect = defect_norm / lhs_norm if lhs_norm > 0 else defect_norm
    derivative = grid.forward(_checked(dF, u_values, "F'"), top)
    t_fu = paraproduct(derivative, u, grid, gap_log2=gap_log2, family=family, twice_l_max=top)
    remainder = grid.forward(lhs, top) - t_fu
    logger.debug(f"[Bony] quadrature defect {defect:.3e}")
    return BonyReport(grid.forward(op, top), defect, remainder)
