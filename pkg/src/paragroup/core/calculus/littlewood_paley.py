"""Littlewood–Paley decomposition in the representation frequency |ξ| = (l(l+1))^{1/2}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from paragroup.core.harmonic.grids import EulerGrid, SphereGrid
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.domain.models import RepLabel


def _glue(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    positive = s > 0
    out[positive] = np.exp(-1.0 / s[positive])
    return out


@lru_cache(maxsize=32)
def _gauss_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True, slots=True)
class CutoffFamily:
    """φ ≡ 1 on [−½, ½], φ ≡ 0 outside (−1, 1), glued smoothly by e^{−1/s}.

    ψ(λ) = −λφ′(λ) and ϑ(λ) = φ(λ/2) − φ(λ); the t-integrals ∫₁^∞ · dt/t are
    discretized with Gauss–Legendre nodes in log₂ t, `nodes_per_octave` per octave.
    """

    nodes_per_octave: int = 32

    def __post_init__(self) -> None:
        if self.nodes_per_octave < 2:
            raise ValueError("nodes_per_octave must be >= 2")

    def phi(self, lam: np.ndarray | float) -> np.ndarray:
        s = np.clip(2.0 * np.abs(np.asarray(lam, dtype=float)) - 1.0, 0.0, 1.0)
        a = _glue(1.0 - s)
        b = _glue(s)
        return a / (a + b)

    def phi_prime(self, lam: np.ndarray | float) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        s = 2.0 * np.abs(lam) - 1.0
        out = np.zeros_like(s)
        inside = (s > 0.0) & (s < 1.0)
        si = s[inside]
        a = np.exp(-1.0 / (1.0 - si))
        b = np.exp(-1.0 / si)
        ds = -a * b * (1.0 / (1.0 - si) ** 2 + 1.0 / si**2) / (a + b) ** 2
        out[inside] = 2.0 * np.sign(lam[inside]) * ds
        return out

    def psi(self, lam: np.ndarray | float) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return -lam * self.phi_prime(lam)

    def vartheta(self, lam: np.ndarray | float) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return self.phi(lam / 2.0) - self.phi(lam)

    def quadrature(self, t_max: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights for ∫₁^{t_max′} g(t) dt/t, t_max′ = 2^⌈log₂ t_max⌉."""
        octaves = max(1, math.ceil(math.log2(max(t_max, 2.0))))
        x, w = _gauss_unit(self.nodes_per_octave)
        u = (np.arange(octaves)[:, None] + (x[None, :] + 1.0) / 2.0).reshape(-1)
        weights = np.tile(w * 0.5 * math.log(2.0), octaves)
        return 2.0**u, weights


DEFAULT_FAMILY = CutoffFamily()


def max_frequency(a: SpectralFn) -> float:
    return max((RepLabel(t).frequency for t in a.blocks), default=0.0)


def dyadic_block(f: SpectralFn, j: int, family: CutoffFamily = DEFAULT_FAMILY) -> SpectralFn:
    """Δ_j f: ϑ(|ξ|/2^j) for j ≥ 0, and φ(|ξ|) for j = −1."""
    if j < -1:
        raise ValueError(f"dyadic index must be >= -1, got {j}")
    if j == -1:
        return f.multiply(lambda label: float(family.phi(label.frequency)))
    scale = 2.0**j
    return f.multiply(lambda label: float(family.vartheta(label.frequency / scale)))


def dyadic_count(f: SpectralFn) -> int:
    """Number of blocks j ≥ 0 needed so that Σ_{j ≥ −1} Δ_j f = f."""
    top = max_frequency(f)
    return max(1, math.ceil(math.log2(max(top, 1.0))) + 2)


def dyadic_decomposition(f: SpectralFn, family: CutoffFamily = DEFAULT_FAMILY) -> list[SpectralFn]:
    return [dyadic_block(f, j, family) for j in range(-1, dyadic_count(f))]


def partial_sum(f: SpectralFn, t: float, family: CutoffFamily = DEFAULT_FAMILY) -> SpectralFn:
    """S_t f = φ(|∇|/t) f."""
    if t <= 0:
        raise ValueError(f"partial sum scale must be positive, got {t}")
    return f.multiply(lambda label: float(family.phi(label.frequency / t)))


def band_piece(f: SpectralFn, t: float, family: CutoffFamily = DEFAULT_FAMILY) -> SpectralFn:
    """ψ(|∇|/t) f."""
    return f.multiply(lambda label: float(family.psi(label.frequency / t)))


def bernstein_constant(s: float) -> float:
    """C with ‖Δ_j f‖_{H^s} ≤ C 2^{js} ‖Δ_j f‖_{L²} for j ≥ 0, s ≥ 0."""
    return 5.0 ** (max(s, 0.0) / 2.0)


def spectral_support(a: SpectralFn, tol: float = 1e-12) -> tuple[float, float] | None:
    """Smallest and largest |ξ| carrying mass above tol·max, or None for zero."""
    norms = a.hs_norms()
    peak = max(norms.values(), default=0.0)
    if peak == 0.0:
        return None
    live = [RepLabel(t).frequency for t, v in norms.items() if v > tol * peak]
    return min(live), max(live)


def _sup(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def zygmund_estimate(
    f: SpectralFn,
    r: float,
    grid: EulerGrid | SphereGrid,
    family: CutoffFamily = DEFAULT_FAMILY,
) -> float:
    """‖φ(|∇|)f‖_∞ + sup_t t^r ‖ψ(|∇|/t) f‖_∞ with sup-norms taken on the grid."""
    total = _sup(grid.inverse(dyadic_block(f, -1, family)))
    t_max = 2.0 * max(max_frequency(f), 1.0)
    nodes, _ = family.quadrature(t_max)
    best = 0.0
    for t in nodes:
        best = max(best, t**r * _sup(grid.inverse(band_piece(f, float(t), family))))
    return total + best
