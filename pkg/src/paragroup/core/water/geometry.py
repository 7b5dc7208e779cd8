"""Geometry of the star-shaped surface r = 1 + ζ(ω) over the unit sphere."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from paragroup.core.calculus.symbols import Symbol
from paragroup.core.harmonic.grids import SphereGrid
from paragroup.core.harmonic.representation import frame_symbol, sphere_point
from paragroup.core.harmonic.spherical import SphFn
from paragroup.domain.errors import AdmissibilityError
from paragroup.domain.models import RepLabel

logger = logging.getLogger(__name__)

FRAME = (1, 2, 3)


def surface_grid(l_max: int) -> SphereGrid:
    """Dealiasing grid for quadratic and cubic expressions in band-l_max data."""
    return SphereGrid.for_band(3 * l_max)


@dataclass(frozen=True, slots=True)
class SurfaceState:
    grid: SphereGrid
    zeta: SphFn
    rho: np.ndarray
    frame: np.ndarray
    hessian: np.ndarray
    laplace: np.ndarray

    @classmethod
    def build(cls, zeta: SphFn, grid: SphereGrid, *, check: bool = True) -> "SurfaceState":
        values = zeta.real_values(grid)
        first = [zeta.frame_derivative(j) for j in FRAME]
        frame = np.stack([f.real_values(grid) for f in first])
        hessian = np.stack(
            [
                np.stack([first[j - 1].frame_derivative(i).real_values(grid) for j in FRAME])
                for i in FRAME
            ]
        )
        laplace = zeta.laplace().real_values(grid)
        state = cls(grid, zeta, 1.0 + values, frame, hessian, laplace)
        if check:
            state.validate()
        return state

    def validate(self) -> None:
        peak = float(np.max(np.abs(self.rho - 1.0)))
        if peak >= 0.5:
            raise AdmissibilityError(f"|zeta| reaches {peak:.3f}; shell coordinates need < 1/2")
        if float(np.min(self.beta1)) <= 0.0:
            raise AdmissibilityError("beta1 is not positive")

    def at_depth(self, y: float) -> "SurfaceState":
        """Shell coordinates ρ = 1 + ζ + y."""
        return replace(self, rho=self.rho + y)

    @property
    def grad_sq(self) -> np.ndarray:
        """G = |∇₀ζ|² = Σ_j (X_jζ)²."""
        return np.sum(self.frame**2, axis=0)

    @property
    def beta1(self) -> np.ndarray:
        return self.rho**2 + self.grad_sq

    @property
    def width(self) -> np.ndarray:
        return np.sqrt(self.beta1)

    @property
    def beta3(self) -> np.ndarray:
        return -self.laplace + 2.0 * self.rho

    def beta2(self, twice_l: int) -> np.ndarray:
        """Σ_j X_jζ σ[X_j](l), skew-Hermitian blocks of shape (nθ, nψ, d, d)."""
        out = 0.0
        for j in FRAME:
            out = out + self.frame[j - 1][..., None, None] * frame_symbol(j, twice_l)
        return out

    def c1_norm(self) -> float:
        return float(np.max(np.abs(self.rho - 1.0)) + np.max(np.sqrt(self.grad_sq)))

    def check_smallness(self, threshold: float) -> bool:
        norm = self.c1_norm()
        if norm > threshold:
            logger.warning(f"[DN] |zeta|_C1 = {norm:.3f} exceeds smallness threshold {threshold}")
            return False
        return True

    def normals(self) -> np.ndarray:
        """Outward unit normal N = (Rω − ∇₀R)/W in Cartesian components, shape (3, nθ, nψ)."""
        theta, psi = self.grid.points()
        omega = np.stack(sphere_point(theta, psi))
        grad = cartesian_gradient(self.zeta, self.grid)
        return (self.rho * omega - grad) / self.width


def coordinate_functions() -> list[SphFn]:
    """ω₁, ω₂, ω₃ as degree-one expansions."""
    c = math.sqrt(2.0 * math.pi / 3.0)
    x = SphFn.zeros(1)
    x.set(1, -1, c)
    x.set(1, 1, -c)
    y = SphFn.zeros(1)
    y.set(1, -1, 1j * c)
    y.set(1, 1, 1j * c)
    z = SphFn.mode(1, 1, 0, math.sqrt(4.0 * math.pi / 3.0))
    return [x, y, z]


def cartesian_gradient(g: SphFn, grid: SphereGrid) -> np.ndarray:
    """Tangential gradient ∇₀g in Cartesian components, via ⟨∇₀g, ∇₀x_k⟩ = Σ_j X_jg X_jx_k."""
    frames = np.stack([g.frame_derivative(j).real_values(grid) for j in FRAME])
    out = []
    for coord in coordinate_functions():
        coord_frames = np.stack([coord.frame_derivative(j).real_values(grid) for j in FRAME])
        out.append(np.sum(frames * coord_frames, axis=0))
    return np.stack(out)


def mean_curvature_values(surface: SurfaceState) -> np.ndarray:
    """H = div N, the sum of principal curvatures (H = 2 on the unit sphere)."""
    r = surface.rho
    g = surface.grad_sq
    w = surface.width
    grad_g = 2.0 * np.einsum("iab,jiab->jab", surface.frame, surface.hessian)
    k = np.sum(surface.frame * grad_g, axis=0)
    return (2.0 * r**2 + 3.0 * g) / w**3 - surface.laplace / (r * w) + k / (2.0 * r * w**3)


def mean_curvature(zeta: SphFn, grid: SphereGrid | None = None, l_max: int | None = None) -> SphFn:
    grid = grid or surface_grid(zeta.l_max)
    top = zeta.l_max if l_max is None else l_max
    values = mean_curvature_values(SurfaceState.build(zeta, grid))
    return SphFn.from_values(values, grid, top)


def curvature_multiplier(n: int | float) -> float:
    """Linearization of H at the unit sphere on degree-n harmonics: H′(0) = (n − 1)(n + 2)."""
    return (n - 1.0) * (n + 2.0)


def curvature_symbol(surface: SurfaceState, twice_labels: list[int]) -> Symbol:
    """Exact symbol h(x, l) of the linearized curvature operator H′(ζ)."""
    r = surface.rho
    g = surface.grad_sq
    w = surface.width
    v = surface.frame
    hess = surface.hessian
    lap = surface.laplace
    grad_g = 2.0 * np.einsum("iab,jiab->jab", v, hess)
    k = np.sum(v * grad_g, axis=0)
    q = np.einsum("iab,ijab->jab", v, hess)
    main = 2.0 * r**2 + 3.0 * g
    c_p = 6.0 / w**3 - 3.0 * main / w**5 + lap / (r * w**3) - 1.5 * k / (r * w**5)
    c_j = c_p[None] * v + (0.5 * grad_g + q) / (r * w**3)[None]
    c_0 = (
        4.0 * r / w**3
        - 3.0 * main * r / w**5
        + lap / (r**2 * w)
        + lap / w**3
        - k / (2.0 * r**2 * w**3)
        - 1.5 * k / w**5
    )
    blocks = {}
    for t in twice_labels:
        label = RepLabel(t)
        b2 = surface.beta2(t)
        eye = np.eye(label.dim)
        block = (label.casimir * (w**2)[..., None, None] * eye + b2 @ b2) / (r * w**3)[
            ..., None, None
        ]
        for j in FRAME:
            block = block + c_j[j - 1][..., None, None] * frame_symbol(j, t)
        blocks[t] = block + c_0[..., None, None] * eye
    return Symbol(surface.grid, blocks, order=2.0)
