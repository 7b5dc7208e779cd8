"""Dirichlet–Neumann operator of the fluid ball {r < 1 + ζ(ω)}.

Two independent routes are provided: an interior-harmonic least-squares solve
(the reference), and the paradifferential formula
D[ζ]φ ≈ T_λ(φ − T_𝔟 ζ) − Σ_j T_{𝔳_j} X_jζ built from the factorization symbols.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_sylvester

from paragroup.core.calculus.diffops import apply_symbol_values, block_stencil
from paragroup.core.calculus.paradiff import AdmissibleCutoff, para_op, paraproduct
from paragroup.core.calculus.symbols import Symbol, apply
from paragroup.core.harmonic.grids import SphereGrid
from paragroup.core.harmonic.representation import sigma
from paragroup.core.harmonic.spherical import SphFn, lift, project
from paragroup.core.parallel import parallel_map
from paragroup.core.water.geometry import FRAME, SurfaceState, surface_grid
from paragroup.domain.errors import (
    AdmissibilityError,
    ConditioningError,
    ParagroupError,
    SylvesterError,
)
from paragroup.domain.models import DIFF_TAGS, RepLabel

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Interior-harmonic reference solve


@lru_cache(maxsize=8)
def _harmonic_basis(grid: SphereGrid, n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Y_n^m and X_jY_n^m at the grid nodes, columns ordered by (n, m); plus degrees."""
    columns, frames, degrees = [], [], []
    for n in range(n_max + 1):
        for m in range(-n, n + 1):
            mode = SphFn.mode(n_max, n, m)
            columns.append(mode.values(grid).reshape(-1))
            frames.append(
                np.stack([mode.frame_derivative(j).values(grid).reshape(-1) for j in FRAME])
            )
            degrees.append(n)
    basis = np.stack(columns, axis=-1)
    frame = np.stack(frames, axis=-1)
    for arr in (basis, frame):
        arr.setflags(write=False)
    return basis, frame, np.asarray(degrees, dtype=float)


@dataclass(frozen=True, slots=True)
class OracleResult:
    value: SphFn
    residual: float
    condition: float


def oracle_dn(
    zeta: SphFn,
    phi: SphFn,
    *,
    n_max: int | None = None,
    cond_threshold: float = 1e12,
    residual_tolerance: float = 1e-6,
    l_max: int | None = None,
) -> OracleResult:
    """D[ζ]φ = ∂_rΦ − ∇₀ζ·∇₀Φ/ρ² at r = ρ, with Φ = Σ c_{nm} r^n Y_n^m fitted to φ on ∂Ω."""
    top = phi.l_max if l_max is None else l_max
    n_max = max(16, top + 8) if n_max is None else n_max
    grid = SphereGrid.for_band(2 * n_max + 2)
    surface = SurfaceState.build(zeta, grid)
    basis, frame, degrees = _harmonic_basis(grid, n_max)
    rho = surface.rho.reshape(-1)
    powers = rho[:, None] ** degrees[None, :]
    sqrt_w = np.sqrt(grid.weights().reshape(-1))
    system = sqrt_w[:, None] * powers * basis
    rhs = sqrt_w * phi.real_values(grid).reshape(-1)
    condition = float(np.linalg.cond(system))
    if not math.isfinite(condition) or condition > cond_threshold:
        raise ConditioningError(
            f"collocation condition number {condition:.3e} over {cond_threshold:.1e}"
        )
    coeffs, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    scale = float(np.linalg.norm(rhs))
    residual = float(np.linalg.norm(system @ coeffs - rhs)) / scale if scale > 0 else 0.0
    if residual > residual_tolerance:
        raise ParagroupError(
            f"collocation residual {residual:.3e} over {residual_tolerance:.1e}",
            reason="trefftz_residual",
        )
    radial = (degrees[None, :] * rho[:, None] ** (degrees[None, :] - 1.0) * basis) @ coeffs
    tangential = np.stack([(powers * frame[j]) @ coeffs for j in range(3)])
    slope = np.sum(surface.frame.reshape(3, -1) * tangential, axis=0)
    dn = np.real(radial - slope / rho**2).reshape(grid.shape)
    logger.debug(f"[DN] oracle residual={residual:.2e} cond={condition:.2e}")
    return OracleResult(SphFn.from_values(dn, grid, top).real_part(), residual, condition)


# ---------------------------------------------------------------------------
# Factorization symbols


def chebyshev_nodes(count: int, lower: float = -0.5) -> np.ndarray:
    """Chebyshev–Lobatto nodes on [lower, 0], ascending, with y = 0 last."""
    k = np.arange(count)
    x = np.cos(np.pi * k / (count - 1))[::-1]
    return lower + (x + 1.0) * (0.0 - lower) / 2.0


def chebyshev_derivative_matrix(nodes: np.ndarray) -> np.ndarray:
    """Spectral differentiation matrix on (ascending) Chebyshev–Lobatto nodes."""
    n = len(nodes) - 1
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    d -= np.diag(np.sum(d, axis=1))
    # nodes are reversed and mapped affinely from [−1, 1]
    scale = 2.0 / (nodes[-1] - nodes[0])
    return scale * d[::-1, ::-1]


@dataclass(frozen=True, slots=True)
class EigenBlock:
    """Per-node eigensystem of H = iβ₂ at one representation."""

    vectors: np.ndarray
    values: np.ndarray
    root: np.ndarray

    def matrix(self, diag: np.ndarray) -> np.ndarray:
        v = self.vectors
        return (v * diag[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def eigensystem(surface: SurfaceState, t: int) -> EigenBlock:
    label = RepLabel(t)
    h = 1j * surface.beta2(t)
    h = 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))
    values, vectors = np.linalg.eigh(h)
    radicand = surface.beta1[..., None] * label.casimir - values**2
    if t > 0 and float(np.min(radicand)) <= 0.0:
        raise AdmissibilityError(
            f"beta2^2 + beta1 l(l+1) is not positive definite at l={label.l}; zeta too large"
        )
    return EigenBlock(vectors, values, np.sqrt(np.clip(radicand, 0.0, None)))


def principal_root(surface: SurfaceState, t: int) -> np.ndarray:
    """(β₂² + β₁l(l+1))^{1/2}, the principal Hermitian square root."""
    eig = eigensystem(surface, t)
    return eig.matrix(eig.root.astype(complex))


def binomial_root(surface: SurfaceState, t: int, terms: int = 12) -> np.ndarray:
    """Same root by the binomial series √(β₁L)·Σ_k C(1/2, k)(β₂²/(β₁L))^k; small |ζ|_C¹ only."""
    label = RepLabel(t)
    if t == 0:
        return np.zeros((*surface.grid.shape, 1, 1), dtype=complex)
    scale = (surface.beta1 * label.casimir)[..., None, None]
    b2 = surface.beta2(t)
    ratio = (b2 @ b2) / scale
    term = np.broadcast_to(np.eye(label.dim, dtype=complex), ratio.shape).copy()
    total = term.copy()
    coeff = 1.0
    for k in range(1, terms):
        coeff *= (0.5 - (k - 1)) / k
        term = term @ ratio
        total = total + coeff * term
    return np.sqrt(scale) * total


def _small_a(surface: SurfaceState, block: EigenBlock) -> np.ndarray:
    b1 = surface.beta1[..., None]
    return block.matrix(-1j * block.values / b1 - block.root / b1)


def _depth_eigenvalues(surface: SurfaceState, eig: EigenBlock, label: RepLabel) -> np.ndarray:
    b1 = surface.beta1[..., None]
    r = surface.rho[..., None]
    return (
        2j * r * eig.values / b1**2
        + r * label.casimir / (b1 * eig.root)
        - 2.0 * r * eig.root / b1**2
    )


def depth_derivative(surface: SurfaceState, t: int) -> np.ndarray:
    """∂_y A₁ at the depth of `surface`, in closed form."""
    label = RepLabel(t)
    if t == 0:
        return np.zeros((*surface.grid.shape, 1, 1), dtype=complex)
    eig = eigensystem(surface, t)
    return eig.matrix(_depth_eigenvalues(surface, eig, label))


def solve_order_zero_reference(a1: np.ndarray, big_a1: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Node-by-node Sylvester solve a₁X − XA₁ = C with scipy, for cross-checking."""
    flat_a = a1.reshape(-1, *a1.shape[-2:])
    flat_b = big_a1.reshape(-1, *big_a1.shape[-2:])
    flat_c = rhs.reshape(-1, *rhs.shape[-2:])
    out = np.stack([solve_sylvester(a, -b, c) for a, b, c in zip(flat_a, flat_b, flat_c)])
    return out.reshape(rhs.shape)


@dataclass(frozen=True, slots=True)
class FactorBlock:
    a1: np.ndarray
    big_a1: np.ndarray
    a0: np.ndarray
    big_a0: np.ndarray
    lambda1: np.ndarray
    lambda0: np.ndarray
    rhs: np.ndarray


def solve_order_zero(
    alpha: np.ndarray, big_alpha: np.ndarray, vectors: np.ndarray, rhs: np.ndarray
) -> np.ndarray:
    """X with a₁X − XA₁ = C, where a₁, A₁ share the eigenvectors `vectors`."""
    vh = np.conj(np.swapaxes(vectors, -1, -2))
    rotated = vh @ rhs @ vectors
    gap = alpha[..., :, None] - big_alpha[..., None, :]
    if float(np.min(np.abs(gap))) < 1e-12:
        raise SylvesterError("spectra of a1 and A1 overlap")
    return vectors @ (rotated / gap) @ vh


def factor_block(surface: SurfaceState, t: int) -> FactorBlock:
    """a₁, A₁, a₀, A₀ and λ₁, λ₀ at one representation, evaluated at the surface y = 0."""
    label = RepLabel(t)
    grid = surface.grid
    rho = surface.rho[..., None, None]
    b1 = surface.beta1
    b3 = surface.beta3
    d = label.dim
    if t == 0:
        zero = np.zeros((*grid.shape, 1, 1), dtype=complex)
        big_a0 = (-b3 / (4.0 * b1))[..., None, None] + zero
        a0 = (-b3 / b1)[..., None, None] - big_a0
        return FactorBlock(
            zero, zero, a0, big_a0, zero, b1[..., None, None] * big_a0 / rho**2, zero
        )

    eig = eigensystem(surface, t)
    b1n = b1[..., None]
    alpha = -1j * eig.values / b1n - eig.root / b1n
    big_alpha = -1j * eig.values / b1n + eig.root / b1n
    a1 = eig.matrix(alpha)
    big_a1 = eig.matrix(big_alpha)
    rhs = eig.matrix(_depth_eigenvalues(surface, eig, label)) + (b3 / b1)[..., None, None] * big_a1

    lower = _small_a(surface, eigensystem(surface, t - 1)) if t >= 2 else None
    if t == 1:
        lower = np.zeros((*grid.shape, 1, 1), dtype=complex)
    upper = _small_a(surface, eigensystem(surface, t + 1))
    for tag in DIFF_TAGS:
        da1 = block_stencil(tag, t, lower, upper)
        dbig = apply_symbol_values(grid, big_a1, lambda lab, tag=tag: sigma(tag, lab))
        rhs = rhs - da1 @ dbig

    big_a0 = solve_order_zero(alpha, big_alpha, eig.vectors, rhs)
    a0 = -(b3 / b1)[..., None, None] * np.eye(d) - big_a0
    lambda1 = eig.matrix(eig.root.astype(complex)) / rho**2
    lambda0 = b1[..., None, None] * big_a0 / rho**2
    return FactorBlock(a1, big_a1, a0, big_a0, lambda1, lambda0, rhs)


@dataclass(frozen=True, slots=True)
class DnSymbols:
    surface: SurfaceState
    blocks: dict[int, FactorBlock]

    def symbol(self, part: str = "lambda") -> Symbol:
        grid = self.surface.grid
        if part == "lambda":
            return Symbol(
                grid, {t: b.lambda1 + b.lambda0 for t, b in self.blocks.items()}, order=1.0
            )
        order = {"lambda1": 1.0, "lambda0": 0.0, "a1": 1.0, "big_a1": 1.0, "a0": 0.0, "big_a0": 0.0}
        if part not in order:
            raise ValueError(f"unknown symbol part {part!r}")
        return Symbol(grid, {t: getattr(b, part) for t, b in self.blocks.items()}, order[part])


def build_factorization(
    surface: SurfaceState, twice_labels: list[int], *, smallness: float | None = None
) -> DnSymbols:
    if smallness is not None:
        surface.check_smallness(smallness)
    results = parallel_map(lambda t: (t, factor_block(surface, t)), twice_labels)
    return DnSymbols(surface, dict(results))


def factorization_over_depth(
    surface: SurfaceState, twice_labels: list[int], y_nodes: np.ndarray
) -> list[DnSymbols]:
    """Factorization symbols in shell coordinates ρ = 1 + ζ + y at each y node."""
    return [build_factorization(surface.at_depth(float(y)), twice_labels) for y in y_nodes]


def depth_profile(phi: SphFn, nodes: np.ndarray) -> list[SphFn]:
    """W(y) = Σ_n (1 + y)^n φ_n, the harmonic extension of φ into the unperturbed shell."""
    return [phi.degree_multiplier(lambda n, y=float(y): (1.0 + y) ** n) for y in nodes]


def _differentiate(d: np.ndarray, stack: list[SphFn]) -> list[SphFn]:
    coeffs = np.einsum("ij,j...->i...", d, np.stack([g.coeffs for g in stack]))
    return [SphFn(stack[0].l_max, c) for c in coeffs]


def _para_sphere(a: Symbol, chi: AdmissibleCutoff, g: SphFn) -> SphFn:
    return project(para_op(a, chi, lift(g), 2 * g.l_max), g.l_max)


@dataclass(frozen=True, slots=True)
class FactorizationResidual:
    """R(y) = T_{β₁}(∂_y − T_a)(∂_y − T_A)W − 𝒫W at the Chebyshev depth nodes.

    `depth_error` compares the closed-form ∂_yA₁ with Chebyshev differentiation of A₁.
    """

    nodes: np.ndarray
    profile: list[SphFn]
    residual: list[SphFn]
    depth_error: float

    def norms(self, s: float = 0.0) -> np.ndarray:
        return np.array([r.norm(s) for r in self.residual])

    def relative(self, s: float = 0.0) -> float:
        return max(
            r.norm(s) / max(w.norm(s), 1e-300) for r, w in zip(self.residual, self.profile)
        )


def _depth_derivative_error(depth: list[DnSymbols], d: np.ndarray) -> float:
    worst = 0.0
    for t in depth[0].blocks:
        if t == 0:
            continue
        stacked = np.stack([syms.blocks[t].big_a1 for syms in depth])
        numeric = np.einsum("ij,j...->i...", d, stacked)
        closed = np.stack([depth_derivative(syms.surface, t) for syms in depth])
        scale = max(float(np.max(np.abs(closed))), 1.0)
        worst = max(worst, float(np.max(np.abs(numeric - closed))) / scale)
    return worst


def factorization_residual(
    zeta: SphFn,
    phi: SphFn,
    *,
    y_nodes: int = 16,
    lower: float = -0.5,
    chi: AdmissibleCutoff | None = None,
    grid: SphereGrid | None = None,
) -> FactorizationResidual:
    """Apply T_{β₁}(∂_y − T_a)(∂_y − T_A) − 𝒫 to the depth profile of φ.

    𝒫 = Δ₀ + T_{β₁}∂_y² − 2T_{β₂}∂_y + T_{β₃}∂_y; ∂_y is Chebyshev differentiation on
    `y_nodes` nodes of [lower, 0]. At ζ = 0 the residual is exactly W/4.
    """
    l_max = phi.l_max
    grid = grid or surface_grid(l_max)
    chi = chi or AdmissibleCutoff()
    surface = SurfaceState.build(zeta, grid)
    labels = [2 * n for n in range(l_max + 1)]
    nodes = chebyshev_nodes(y_nodes, lower)
    d = chebyshev_derivative_matrix(nodes)
    depth = factorization_over_depth(surface, labels, nodes)

    w = depth_profile(phi, nodes)
    dw = _differentiate(d, w)
    d2w = _differentiate(d, dw)
    v = [
        dw_k - _para_sphere(syms.symbol("big_a1") + syms.symbol("big_a0"), chi, w_k)
        for syms, w_k, dw_k in zip(depth, w, dw)
    ]
    dv = _differentiate(d, v)
    z = [
        dv_k - _para_sphere(syms.symbol("a1") + syms.symbol("a0"), chi, v_k)
        for syms, v_k, dv_k in zip(depth, v, dv)
    ]

    def eye(label: RepLabel) -> np.ndarray:
        return np.eye(label.dim)

    residual = []
    for syms, w_k, dw_k, d2w_k, z_k in zip(depth, w, dw, d2w, z):
        shell = syms.surface
        beta1 = Symbol.scalar_field(grid, shell.beta1, eye, labels)
        beta2 = Symbol(grid, {t: shell.beta2(t) for t in labels}, order=1.0)
        beta3 = Symbol.scalar_field(grid, shell.beta3, eye, labels)
        r = (
            _para_sphere(beta1, chi, z_k - d2w_k)
            - w_k.laplace()
            + _para_sphere(beta2, chi, dw_k) * 2.0
            - _para_sphere(beta3, chi, dw_k)
        )
        residual.append(r)

    result = FactorizationResidual(nodes, w, residual, _depth_derivative_error(depth, d))
    logger.debug(
        f"[DN] factorization residual over {y_nodes} depth nodes: relative "
        f"{result.relative():.3e}, depth derivative {result.depth_error:.2e}"
    )
    return result


def flat_dn_multiplier(label: RepLabel) -> float:
    """λ(0, l) = (l(l+1))^{1/2} − 1/2."""
    return label.frequency - 0.5


# ---------------------------------------------------------------------------
# Paralinearized formula


@dataclass(frozen=True, slots=True)
class GoodUnknown:
    u: SphFn
    b: np.ndarray
    v: np.ndarray


def good_unknown_fields(
    surface: SurfaceState, phi: SphFn, dn_value: SphFn
) -> tuple[np.ndarray, np.ndarray]:
    """𝔟 = (D[ζ]φ + ∇₀ζ·∇₀φ/ρ²)/(1 + G/ρ²) and 𝔳_j = (X_jφ − 𝔟X_jζ)/ρ² on the grid."""
    grid = surface.grid
    rho2 = surface.rho**2
    dphi = np.stack([phi.frame_derivative(j).real_values(grid) for j in FRAME])
    cross = np.sum(surface.frame * dphi, axis=0)
    b = (dn_value.real_values(grid) + cross / rho2) / (1.0 + surface.grad_sq / rho2)
    v = (dphi - b[None] * surface.frame) / rho2[None]
    return b, v


def good_unknown(
    zeta: SphFn,
    phi: SphFn,
    dn_value: SphFn,
    *,
    grid: SphereGrid | None = None,
    gap_log2: float = 10.0,
) -> GoodUnknown:
    grid = grid or surface_grid(phi.l_max)
    surface = SurfaceState.build(zeta, grid)
    b, v = good_unknown_fields(surface, phi, dn_value)
    top = 2 * phi.l_max
    b_spec = grid.forward(b, top)
    lifted = lift(zeta.resize(phi.l_max))
    tb_zeta = project(paraproduct(b_spec, lifted, grid, gap_log2=gap_log2, twice_l_max=top))
    return GoodUnknown(phi - tb_zeta, b, v)


@dataclass(frozen=True, slots=True)
class ParalinearResult:
    value: SphFn
    symbols: DnSymbols
    good: GoodUnknown


def paralinearized_dn(
    zeta: SphFn,
    phi: SphFn,
    *,
    dn_value: SphFn | None = None,
    chi: AdmissibleCutoff | None = None,
    gap_log2: float = 10.0,
    grid: SphereGrid | None = None,
    smallness: float | None = 0.1,
) -> ParalinearResult:
    """T_λ(φ − T_𝔟ζ) − Σ_j T_{𝔳_j}(X_jζ), projected to S².

    Without `dn_value`, 𝔟 is computed from the predictor Op(λ)φ.
    """
    l_max = phi.l_max
    grid = grid or surface_grid(l_max)
    chi = chi or AdmissibleCutoff()
    surface = SurfaceState.build(zeta, grid)
    labels = [2 * n for n in range(l_max + 1)]
    symbols = build_factorization(surface, labels, smallness=smallness)
    lam = symbols.symbol("lambda")
    top = 2 * l_max
    if dn_value is None:
        dn_value = project(apply(lam, lift(phi), top), l_max).real_part()
    good = good_unknown(zeta, phi, dn_value, grid=grid, gap_log2=gap_log2)
    value = project(para_op(lam, chi, lift(good.u), top), l_max)
    for j in FRAME:
        v_spec = grid.forward(good.v[j - 1], top)
        xz = lift(zeta.frame_derivative(j).resize(l_max))
        term = paraproduct(v_spec, xz, grid, gap_log2=gap_log2, twice_l_max=top)
        value = value - project(term, l_max)
    logger.debug(f"[DN] paralinearized l_max={l_max} on {grid.ident}")
    return ParalinearResult(value.real_part(), symbols, good)


def remainder_report(oracle: SphFn, para: SphFn, s: float = 0.0) -> dict[str, float]:
    diff = oracle - para
    return {
        "remainder_hs": diff.norm(s),
        "remainder_hs_half": diff.norm(s + 0.5),
        "oracle_hs": oracle.norm(s),
        "relative": diff.norm(s + 0.5) / max(oracle.norm(s + 0.5), 1e-300),
    }
