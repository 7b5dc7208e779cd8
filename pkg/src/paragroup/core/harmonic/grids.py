"""Quadrature grids on SU(2) and on the sphere S² = SU(2)/T₃.

Both grids integrate products of matrix entries exactly up to a combined degree
(`exactness`, in units of l + l′).  Angles follow the half-open chart
φ ∈ [0, 2π), θ ∈ [0, π], ψ ∈ [−2π, 2π); θ uses Gauss–Legendre nodes in cos θ.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from paragroup.core.harmonic.representation import wigner_small
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.parallel import parallel_map
from paragroup.domain.errors import GridResolutionError
from paragroup.domain.models import RepLabel

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _gauss_theta(n_theta: int) -> tuple[np.ndarray, np.ndarray]:
    z, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(z)
    theta.setflags(write=False)
    w.setflags(write=False)
    return theta, w


@lru_cache(maxsize=256)
def _theta_wigner(twice_l: int, n_theta: int) -> np.ndarray:
    theta, _ = _gauss_theta(n_theta)
    out = wigner_small(twice_l, theta)
    out.setflags(write=False)
    return out


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise GridResolutionError(message)


@dataclass(frozen=True, slots=True)
class EulerGrid:
    n_phi: int
    n_theta: int
    n_psi: int

    def __post_init__(self) -> None:
        if min(self.n_phi, self.n_theta, self.n_psi) < 1:
            raise GridResolutionError(f"grid sizes must be positive, got {self.shape}")

    @classmethod
    def for_band(cls, exactness: int) -> "EulerGrid":
        """Smallest grid integrating entry products of combined degree `exactness`."""
        return cls(exactness + 1, exactness // 2 + 1, 2 * exactness + 1)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_phi, self.n_theta, self.n_psi)

    @property
    def exactness(self) -> int:
        return min(2 * self.n_theta - 1, self.n_phi - 1, (self.n_psi - 1) // 2)

    @property
    def ident(self) -> str:
        return f"euler:{self.n_phi}x{self.n_theta}x{self.n_psi}"

    @property
    def phi(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def theta(self) -> np.ndarray:
        return _gauss_theta(self.n_theta)[0]

    @property
    def psi(self) -> np.ndarray:
        return -2.0 * math.pi + 4.0 * math.pi * np.arange(self.n_psi) / self.n_psi

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(self.phi, self.theta, self.psi, indexing="ij")

    def weights(self) -> np.ndarray:
        """Normalized Haar quadrature weights, shape (nφ, nθ, nψ), summing to one."""
        _, w = _gauss_theta(self.n_theta)
        per_theta = w / (2.0 * self.n_phi * self.n_psi)
        return np.broadcast_to(per_theta[None, :, None], self.shape).copy()

    def integrate(self, values: np.ndarray) -> np.ndarray:
        w = self.weights()
        return np.tensordot(w, values, axes=([0, 1, 2], [0, 1, 2]))

    def _phases(self, twice_l_max: int) -> tuple[np.ndarray, np.ndarray]:
        twice_n = np.arange(-twice_l_max, twice_l_max + 1) / 2.0
        e_phi = np.exp(1j * np.outer(self.phi, twice_n))
        e_psi = np.exp(1j * np.outer(self.psi, twice_n))
        return e_phi, e_psi

    def forward(self, values: np.ndarray, twice_l_max: int) -> SpectralFn:
        values = np.asarray(values)
        _require(values.shape[:3] == self.shape, f"values {values.shape} do not fit {self.shape}")
        _require(
            twice_l_max <= self.exactness,
            f"grid {self.ident} integrates degree {self.exactness}, need {twice_l_max}",
        )
        _, w = _gauss_theta(self.n_theta)
        e_phi, e_psi = self._phases(twice_l_max)
        fourier = np.einsum("abc...,ak,cj->kbj...", values, e_phi, e_psi) / (
            self.n_phi * self.n_psi
        )

        def block(t: int) -> tuple[int, np.ndarray]:
            pos = np.arange(-t, t + 1, 2) + twice_l_max
            sub = fourier[pos][:, :, pos]
            small = _theta_wigner(t, self.n_theta)
            return t, 0.5 * np.einsum("nbm...,b,bnm->...mn", sub, w, small.conj())

        return SpectralFn(twice_l_max, dict(parallel_map(block, range(twice_l_max + 1))))

    def inverse(self, a: SpectralFn) -> np.ndarray:
        top = a.twice_l_max
        batch = a.batch_shape
        e_phi, e_psi = self._phases(top)

        def block(t: int) -> tuple[np.ndarray, np.ndarray]:
            pos = np.arange(-t, t + 1, 2) + top
            small = _theta_wigner(t, self.n_theta)
            return pos, (t + 1) * np.einsum("...mn,bnm->nbm...", a.block(t), small)

        accumulated = np.zeros((2 * top + 1, self.n_theta, 2 * top + 1, *batch), dtype=complex)
        for pos, contribution in parallel_map(block, sorted(a.blocks)):
            accumulated[np.ix_(pos, np.arange(self.n_theta), pos)] += contribution
        return np.einsum("kbj...,ak,cj->abc...", accumulated, e_phi.conj(), e_psi.conj())

    def filter_values(
        self,
        values: np.ndarray,
        multiplier: Callable[[RepLabel], float],
        twice_l_max: int | None = None,
    ) -> np.ndarray:
        top = self.exactness if twice_l_max is None else twice_l_max
        spectrum = self.forward(values, top).multiply(multiplier)
        return self.inverse(spectrum)


@dataclass(frozen=True, slots=True)
class SphereGrid:
    """Grid on S² in (θ, ψ); samples of T₃-invariant functions on SU(2)."""

    n_theta: int
    n_psi: int

    def __post_init__(self) -> None:
        if min(self.n_theta, self.n_psi) < 1:
            raise GridResolutionError(f"grid sizes must be positive, got {self.shape}")

    @classmethod
    def for_band(cls, exactness: int) -> "SphereGrid":
        return cls(exactness // 2 + 1, exactness + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_theta, self.n_psi)

    @property
    def exactness(self) -> int:
        return min(2 * self.n_theta - 1, self.n_psi - 1)

    @property
    def ident(self) -> str:
        return f"sphere:{self.n_theta}x{self.n_psi}"

    @property
    def theta(self) -> np.ndarray:
        return _gauss_theta(self.n_theta)[0]

    @property
    def psi(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.n_psi) / self.n_psi

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.theta, self.psi, indexing="ij")

    def weights(self) -> np.ndarray:
        _, w = _gauss_theta(self.n_theta)
        return np.broadcast_to((w / (2.0 * self.n_psi))[:, None], self.shape).copy()

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights(), values, axes=([0, 1], [0, 1]))

    def row0(self, degree: int) -> np.ndarray:
        """P^l_{0m}(θ_b) for integer l, shape (nθ, 2l + 1)."""
        return _theta_wigner(2 * degree, self.n_theta)[:, degree, :]

    def analyze(self, values: np.ndarray, l_max: int) -> dict[int, np.ndarray]:
        """Column coefficients f̂(l)[·, n=0] for l ≤ l_max; shape (*batch, 2l + 1)."""
        values = np.asarray(values)
        _require(values.shape[:2] == self.shape, f"values {values.shape} do not fit {self.shape}")
        _require(
            2 * l_max <= self.exactness,
            f"grid {self.ident} integrates degree {self.exactness}, need {2 * l_max}",
        )
        _, w = _gauss_theta(self.n_theta)
        m = np.arange(-l_max, l_max + 1)
        e_psi = np.exp(1j * np.outer(self.psi, m))
        fourier = np.einsum("bc...,cm->bm...", values, e_psi) / self.n_psi
        columns = {}
        for degree in range(l_max + 1):
            sub = fourier[:, l_max - degree : l_max + degree + 1]
            columns[degree] = 0.5 * np.einsum("bm...,b,bm->...m", sub, w, self.row0(degree).conj())
        return columns

    def synthesize(self, columns: dict[int, np.ndarray]) -> np.ndarray:
        l_max = max(columns, default=0)
        batch = next(iter(columns.values())).shape[:-1] if columns else ()
        accumulated = np.zeros((self.n_theta, 2 * l_max + 1, *batch), dtype=complex)
        for degree, col in columns.items():
            contribution = (2 * degree + 1) * np.einsum("...m,bm->bm...", col, self.row0(degree))
            accumulated[:, l_max - degree : l_max + degree + 1] += contribution
        m = np.arange(-l_max, l_max + 1)
        e_psi = np.exp(-1j * np.outer(self.psi, m))
        return np.einsum("bm...,cm->bc...", accumulated, e_psi)

    def forward(self, values: np.ndarray, twice_l_max: int) -> SpectralFn:
        columns = self.analyze(values, twice_l_max // 2)
        blocks = {}
        for degree, col in columns.items():
            d = 2 * degree + 1
            block = np.zeros((*col.shape[:-1], d, d), dtype=complex)
            block[..., :, degree] = col
            blocks[2 * degree] = block
        return SpectralFn(twice_l_max, blocks)

    def inverse(self, a: SpectralFn) -> np.ndarray:
        a.require_t3_invariant("sphere synthesis input")
        columns = {t // 2: b[..., :, t // 2] for t, b in a.blocks.items() if t % 2 == 0}
        return self.synthesize(columns)

    def apply_columns(
        self, values: np.ndarray, matrix: Callable[[RepLabel], np.ndarray], l_max: int | None = None
    ) -> np.ndarray:
        """Apply an invariant operator, given by its symbol, to grid samples."""
        top = self.exactness // 2 if l_max is None else l_max
        columns = self.analyze(values, top)
        moved = {
            degree: np.einsum("ij,...j->...i", matrix(RepLabel(2 * degree)), col)
            for degree, col in columns.items()
        }
        return self.synthesize(moved)

    def filter_values(
        self,
        values: np.ndarray,
        multiplier: Callable[[RepLabel], float],
        l_max: int | None = None,
    ) -> np.ndarray:
        top = self.exactness // 2 if l_max is None else l_max
        columns = self.analyze(values, top)
        scaled = {d: multiplier(RepLabel(2 * d)) * col for d, col in columns.items()}
        return self.synthesize(scaled)


@dataclass(frozen=True, slots=True)
class GridFn:
    grid: EulerGrid | SphereGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        ndim = len(self.grid.shape)
        if self.values.shape[:ndim] != self.grid.shape:
            raise GridResolutionError(
                f"values {self.values.shape} do not fit grid {self.grid.ident}"
            )
