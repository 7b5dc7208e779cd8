"""Functions on S² in spherical-harmonic coefficients, and their lift to SU(2).

A function g on S² lifts to the T₃-invariant g♯(φ, θ, ψ) = g(θ, ψ).  Only the n = 0
column of the integer blocks of ĝ♯ is populated; it is related to the
coefficients of g by T^l_{0m}(x) = i^m (4π/(2l+1))^{1/2} Y_l^{−m}(θ, ψ).
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from paragroup.core.harmonic.grids import SphereGrid
from paragroup.core.harmonic.representation import frame_symbol
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.domain.errors import IndexRangeError
from paragroup.domain.models import RepLabel

try:
    from scipy.special import sph_harm_y as _sph_harm_y
except ImportError:  # scipy < 1.15
    from scipy.special import sph_harm as _sph_harm

    def _sph_harm_y(n, m, theta, phi):
        return _sph_harm(m, n, phi, theta)


_I_POW = np.array([1.0, 1j, -1.0, -1j])


def spherical_harmonic(n: int, m: int, theta: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Orthonormal Y_n^m (Condon–Shortley phase) at polar angle θ and azimuth ψ."""
    return _sph_harm_y(n, m, np.asarray(theta, dtype=float), np.asarray(psi, dtype=float))


def lift_phase(m: int) -> complex:
    """Phase κ_m with T^l_{0m} = κ_m (4π/(2l+1))^{1/2} Y_l^{−m}."""
    return complex(_I_POW[m % 4])


@dataclass(slots=True)
class SphFn:
    """Coefficients c[n, m + l_max] of Σ c_{nm} Y_n^m for orthonormal Y on the unit sphere.

    Norms and means use the normalized measure dμ₀, so ∫|Y|² dμ₀ = 1/(4π).
    """

    l_max: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.l_max < 0:
            raise IndexRangeError(f"l_max must be nonnegative, got {self.l_max}")
        expected = (self.l_max + 1, 2 * self.l_max + 1)
        if self.coeffs.shape != expected:
            raise IndexRangeError(f"coeffs shape {self.coeffs.shape}, expected {expected}")
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @classmethod
    def zeros(cls, l_max: int) -> "SphFn":
        return cls(l_max, np.zeros((l_max + 1, 2 * l_max + 1), dtype=complex))

    @classmethod
    def mode(cls, l_max: int, n: int, m: int, value: complex = 1.0) -> "SphFn":
        out = cls.zeros(l_max)
        out.set(n, m, value)
        return out

    @classmethod
    def real_mode(cls, l_max: int, n: int, m: int, value: float = 1.0) -> "SphFn":
        """Real harmonic: Y_n^0, √2 Re Y_n^m (m > 0) or √2 Im Y_n^{|m|} (m < 0)."""
        out = cls.zeros(l_max)
        k = abs(m)
        if m == 0:
            out.set(n, 0, value)
        elif m > 0:
            out.set(n, k, value / math.sqrt(2.0))
            out.set(n, -k, (-1) ** k * value / math.sqrt(2.0))
        else:
            out.set(n, k, value / (1j * math.sqrt(2.0)))
            out.set(n, -k, -((-1) ** k) * value / (1j * math.sqrt(2.0)))
        return out

    @classmethod
    def from_records(cls, l_max: int, records: Iterable[tuple[int, int, float]]) -> "SphFn":
        out = cls.zeros(l_max)
        for n, m, value in records:
            out = out + cls.real_mode(l_max, n, m, value)
        return out

    @classmethod
    def random(cls, l_max: int, rng: np.random.Generator, *, real: bool = True) -> "SphFn":
        coeffs = rng.standard_normal((l_max + 1, 2 * l_max + 1)) + 1j * rng.standard_normal(
            (l_max + 1, 2 * l_max + 1)
        )
        out = cls(l_max, coeffs * _support_mask(l_max))
        return out.real_part() if real else out

    def _check(self, n: int, m: int) -> None:
        if not (0 <= n <= self.l_max and abs(m) <= n):
            raise IndexRangeError(f"mode (n={n}, m={m}) outside l_max={self.l_max}")

    def get(self, n: int, m: int) -> complex:
        self._check(n, m)
        return complex(self.coeffs[n, m + self.l_max])

    def set(self, n: int, m: int, value: complex) -> None:
        self._check(n, m)
        self.coeffs[n, m + self.l_max] = value

    def copy(self) -> "SphFn":
        return SphFn(self.l_max, self.coeffs.copy())

    def resize(self, l_max: int) -> "SphFn":
        out = SphFn.zeros(l_max)
        k = min(l_max, self.l_max)
        out.coeffs[: k + 1, l_max - k : l_max + k + 1] = self.coeffs[
            : k + 1, self.l_max - k : self.l_max + k + 1
        ]
        return out

    def _aligned(self, other: "SphFn") -> tuple[np.ndarray, np.ndarray, int]:
        top = max(self.l_max, other.l_max)
        return self.resize(top).coeffs, other.resize(top).coeffs, top

    def __add__(self, other: "SphFn") -> "SphFn":
        a, b, top = self._aligned(other)
        return SphFn(top, a + b)

    def __sub__(self, other: "SphFn") -> "SphFn":
        a, b, top = self._aligned(other)
        return SphFn(top, a - b)

    def __mul__(self, scalar: complex) -> "SphFn":
        return SphFn(self.l_max, scalar * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> "SphFn":
        return SphFn(self.l_max, -self.coeffs)

    def degree_multiplier(self, fn) -> "SphFn":
        n = np.arange(self.l_max + 1, dtype=float)
        factors = np.array([fn(k) for k in n], dtype=complex)
        return SphFn(self.l_max, factors[:, None] * self.coeffs)

    def laplace(self) -> "SphFn":
        return self.degree_multiplier(lambda n: -n * (n + 1))

    def real_part(self) -> "SphFn":
        """Coefficients of Re g, using c_{n,−m} = (−1)^m conj c_{n,m} for real functions."""
        m = np.arange(-self.l_max, self.l_max + 1)
        mirrored = ((-1.0) ** np.abs(m))[None, :] * np.conj(self.coeffs[:, ::-1])
        return SphFn(self.l_max, 0.5 * (self.coeffs + mirrored))

    def norm(self, s: float = 0.0) -> float:
        """Sobolev norm with respect to the normalized measure: Σ⟨n⟩^{2s}|c|²/(4π)."""
        n = np.arange(self.l_max + 1, dtype=float)
        weight = (1.0 + n * (n + 1)) ** s
        return float(np.sqrt(np.sum(weight[:, None] * np.abs(self.coeffs) ** 2) / (4 * math.pi)))

    def mean(self) -> complex:
        """∫ g dμ₀ with dμ₀ normalized to total mass one."""
        return complex(self.coeffs[0, self.l_max]) / math.sqrt(4 * math.pi)

    def without_degrees(self, degrees: Iterable[int]) -> "SphFn":
        out = self.copy()
        for n in degrees:
            if n <= self.l_max:
                out.coeffs[n] = 0.0
        return out

    def only_degrees(self, degrees: Iterable[int]) -> "SphFn":
        keep = set(degrees)
        return self.without_degrees([n for n in range(self.l_max + 1) if n not in keep])

    def columns(self) -> dict[int, np.ndarray]:
        """Lifted n = 0 columns, one per degree."""
        out = {}
        for n in range(self.l_max + 1):
            mprime = np.arange(-n, n + 1)
            c = self.coeffs[n, self.l_max - mprime]
            out[n] = _I_POW[(-mprime) % 4] * c / math.sqrt(4 * math.pi * (2 * n + 1))
        return out

    @classmethod
    def from_columns(cls, columns: dict[int, np.ndarray], l_max: int) -> "SphFn":
        out = cls.zeros(l_max)
        for n, col in columns.items():
            if n > l_max:
                continue
            mprime = np.arange(-n, n + 1)
            out.coeffs[n, l_max - mprime] = (
                math.sqrt(4 * math.pi * (2 * n + 1)) * _I_POW[mprime % 4] * col
            )
        return out

    def values(self, grid: SphereGrid) -> np.ndarray:
        return grid.synthesize(self.columns())

    def real_values(self, grid: SphereGrid) -> np.ndarray:
        return np.real(self.values(grid))

    @classmethod
    def from_values(cls, values: np.ndarray, grid: SphereGrid, l_max: int) -> "SphFn":
        return cls.from_columns(grid.analyze(values, l_max), l_max)

    def frame_derivative(self, j: int) -> "SphFn":
        """X_j g♯, which stays T₃-invariant."""
        cols = self.columns()
        moved = {n: frame_symbol(j, RepLabel(2 * n)) @ col for n, col in cols.items()}
        return SphFn.from_columns(moved, self.l_max)

    def gradient_values(self, grid: SphereGrid) -> np.ndarray:
        """Frame components (X₁g, X₂g, X₃g) on the grid, shape (3, nθ, nψ)."""
        return np.stack([self.frame_derivative(j).values(grid) for j in (1, 2, 3)])


def _support_mask(l_max: int) -> np.ndarray:
    n = np.arange(l_max + 1)[:, None]
    m = np.arange(-l_max, l_max + 1)[None, :]
    return (np.abs(m) <= n).astype(float)


def lift(g: SphFn) -> SpectralFn:
    """Spectrum of the T₃-invariant lift g♯."""
    blocks = {}
    for n, col in g.columns().items():
        d = 2 * n + 1
        block = np.zeros((d, d), dtype=complex)
        block[:, n] = col
        blocks[2 * n] = block
    return SpectralFn(2 * g.l_max, blocks)


def project(a: SpectralFn, l_max: int | None = None) -> SphFn:
    """Inverse of `lift`; the spectrum must be T₃-invariant."""
    a.require_t3_invariant()
    top = a.twice_l_max // 2 if l_max is None else l_max
    columns = {t // 2: b[:, t // 2] for t, b in a.blocks.items() if t % 2 == 0}
    return SphFn.from_columns(columns, top)
