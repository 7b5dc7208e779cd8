"""Matrix-valued symbols a(x, l) and their quantization Op(a).

A symbol stores one block per representation: either a single (d, d) matrix when it
does not depend on x, or an array of shape (*grid.shape, d, d) sampled on a grid.
On a SphereGrid only T₃-invariant x-dependence is representable; quantization
there acts on lifted functions on S² and so reads integer blocks only.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from paragroup.core.calculus.diffops import (
    MultiIndex,
    apply_symbol_values,
    difference_blocks,
    sigma_power,
)
from paragroup.core.calculus.taylor import TaylorOperators, multi_indices, taylor_operators
from paragroup.core.harmonic.grids import EulerGrid, SphereGrid
from paragroup.core.harmonic.io import deinterleave, interleave
from paragroup.core.harmonic.representation import sigma, wigner_matrix
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.parallel import parallel_map
from paragroup.domain.errors import IndexRangeError
from paragroup.domain.models import DIFF_TAGS, DiffTag, RepLabel

logger = logging.getLogger(__name__)

Grid = EulerGrid | SphereGrid


@dataclass(slots=True)
class Symbol:
    grid: Grid
    blocks: dict[int, np.ndarray] = field(default_factory=dict)
    order: float = 0.0
    truncated: bool = False

    def __post_init__(self) -> None:
        shape = self.grid.shape
        for t, block in self.blocks.items():
            d = t + 1
            if block.shape[-2:] != (d, d):
                raise IndexRangeError(f"block 2l={t} has shape {block.shape}, expected d={d}")
            if block.ndim > 2 and block.shape[:-2] != shape:
                raise IndexRangeError(f"block 2l={t} does not fit grid {self.grid.ident}")

    @classmethod
    def constant(
        cls,
        grid: Grid,
        fn: Callable[[RepLabel], np.ndarray | complex],
        twice_labels: Iterable[int],
        order: float = 0.0,
    ) -> "Symbol":
        blocks = {}
        for t in twice_labels:
            value = np.asarray(fn(RepLabel(t)), dtype=complex)
            blocks[t] = value * np.eye(t + 1) if value.ndim == 0 else value
        return cls(grid, blocks, order)

    @classmethod
    def identity(cls, grid: Grid, twice_labels: Iterable[int]) -> "Symbol":
        return cls.constant(grid, lambda _: 1.0, twice_labels, 0.0)

    @classmethod
    def from_pi(cls, grid: Grid, tag: DiffTag, twice_labels: Iterable[int]) -> "Symbol":
        return cls.constant(grid, lambda label: sigma(tag, label), twice_labels, 1.0)

    @classmethod
    def scalar_field(
        cls,
        grid: Grid,
        values: np.ndarray,
        matrix: Callable[[RepLabel], np.ndarray],
        twice_labels: Iterable[int],
        order: float = 0.0,
    ) -> "Symbol":
        """a(x, l) = c(x)·M(l) for grid samples c."""
        blocks = {t: values[..., None, None] * matrix(RepLabel(t)) for t in twice_labels}
        return cls(grid, blocks, order)

    @property
    def twice_l_max(self) -> int:
        return max(self.blocks, default=-1)

    @property
    def labels(self) -> list[int]:
        return sorted(self.blocks)

    def is_constant(self, t: int) -> bool:
        return self.blocks[t].ndim == 2

    def full(self, t: int) -> np.ndarray:
        block = self.blocks[t]
        if block.ndim == 2:
            return np.broadcast_to(block, (*self.grid.shape, *block.shape))
        return block

    def map(self, fn: Callable[[RepLabel, np.ndarray], np.ndarray], order: float | None = None):
        return Symbol(
            self.grid,
            {t: fn(RepLabel(t), b) for t, b in self.blocks.items()},
            self.order if order is None else order,
            self.truncated,
        )

    def restrict(self, twice_labels: Iterable[int]) -> "Symbol":
        keep = set(twice_labels)
        return Symbol(
            self.grid,
            {t: b for t, b in self.blocks.items() if t in keep},
            self.order,
            self.truncated,
        )

    def _zip(self, other: "Symbol", op: Callable[[np.ndarray, np.ndarray], np.ndarray], order):
        if other.grid != self.grid:
            raise ValueError("symbols live on different grids")
        keys = sorted(set(self.blocks) & set(other.blocks))
        return Symbol(
            self.grid,
            {t: op(self.blocks[t], other.blocks[t]) for t in keys},
            order,
            self.truncated or other.truncated,
        )

    def __add__(self, other: "Symbol") -> "Symbol":
        return self._zip(other, np.add, max(self.order, other.order))

    def __sub__(self, other: "Symbol") -> "Symbol":
        return self._zip(other, np.subtract, max(self.order, other.order))

    def __matmul__(self, other: "Symbol") -> "Symbol":
        return self._zip(other, np.matmul, self.order + other.order)

    def scale(self, c: complex | np.ndarray) -> "Symbol":
        """Multiply by a scalar or by grid samples c(x)."""
        c = np.asarray(c)
        if c.ndim == 0:
            return self.map(lambda _, b: c * b)
        return self.map(lambda _, b: c[..., None, None] * b)

    def star(self) -> "Symbol":
        return self.map(lambda _, b: np.conj(np.swapaxes(b, -1, -2)))

    def differences(self, tag: DiffTag) -> "Symbol":
        blocks, truncated = difference_blocks(tag, self.blocks, self.twice_l_max)
        return Symbol(self.grid, blocks, self.order - 1.0, self.truncated or truncated)

    def multi_difference(self, alpha: MultiIndex) -> "Symbol":
        out = self
        for tag, power in zip(DIFF_TAGS, alpha):
            for _ in range(power):
                out = out.differences(tag)
        return out

    def x_apply(self, matrix: Callable[[RepLabel], np.ndarray]) -> "Symbol":
        """Apply an invariant operator to the x-dependence of every entry."""

        def one(t: int) -> tuple[int, np.ndarray]:
            block = self.blocks[t]
            if block.ndim == 2:
                return t, np.zeros_like(block)
            return t, apply_symbol_values(self.grid, block, matrix)

        return Symbol(self.grid, dict(parallel_map(one, self.labels)), self.order, self.truncated)

    def x_derivative(self, tag: DiffTag) -> "Symbol":
        return self.x_apply(lambda label: sigma(tag, label))

    def x_taylor(self, alpha: MultiIndex, ops: TaylorOperators | None = None) -> "Symbol":
        if sum(alpha) == 0:
            return self
        ops = ops or taylor_operators()
        return self.x_apply(lambda label: ops.symbol(alpha, label.twice_l))

    def x_spectrum(self, t: int, twice_band: int | None = None) -> SpectralFn:
        """x-Fourier coefficients of every entry of block t (batch axes are the entries)."""
        block = self.full(t)
        if isinstance(self.grid, SphereGrid):
            top = self.grid.exactness // 2 if twice_band is None else twice_band // 2
            return self.grid.forward(block, 2 * top)
        top = self.grid.exactness if twice_band is None else twice_band
        return self.grid.forward(block, top)

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(b))) for b in self.blocks.values()), default=0.0)


def x_independent(grid: Grid, a: SpectralFn, order: float = 0.0) -> Symbol:
    """Symbol of the invariant operator with multiplier blocks a(l)."""
    return Symbol(grid, {t: b.copy() for t, b in a.blocks.items()}, order)


def _entry_matrices(grid: EulerGrid, t: int) -> np.ndarray:
    phi, theta, psi = grid.points()
    return wigner_matrix(t, phi, theta, psi)


def quantize(a: Symbol, f: SpectralFn) -> np.ndarray:
    """Op(a)f(x) = Σ_l (2l + 1) Tr(a(x, l) f̂(l) T^l(x)) sampled on the symbol grid."""
    grid = a.grid
    missing = [t for t, b in f.blocks.items() if t not in a.blocks and np.any(b)]
    if missing:
        raise IndexRangeError(f"symbol lacks blocks 2l={missing}")
    if isinstance(grid, SphereGrid):
        return _quantize_sphere(a, f)

    def one(t: int) -> np.ndarray:
        wig = _entry_matrices(grid, t)
        return (t + 1) * np.einsum("...ij,jk,...ki->...", a.blocks[t], f.blocks[t], wig)

    parts = parallel_map(one, sorted(set(f.blocks) & set(a.blocks)))
    return np.sum(parts, axis=0) if parts else np.zeros(grid.shape, dtype=complex)


def _quantize_sphere(a: Symbol, f: SpectralFn) -> np.ndarray:
    f.require_t3_invariant("sphere quantization input")
    grid = a.grid
    out = np.zeros(grid.shape, dtype=complex)
    for t, block in f.blocks.items():
        if t % 2:
            continue
        if t not in a.blocks:
            continue
        degree = t // 2
        av = a.blocks[t] @ block[:, degree]
        m = np.arange(-degree, degree + 1)
        rows = grid.row0(degree)[:, None, :] * np.exp(-1j * np.outer(grid.psi, m))[None, :, :]
        out += (t + 1) * np.sum(rows * av, axis=-1)
    return out


def apply(a: Symbol, f: SpectralFn, twice_l_max: int | None = None) -> SpectralFn:
    """Op(a)f transformed back to Fourier coefficients."""
    values = quantize(a, f)
    top = f.twice_l_max if twice_l_max is None else twice_l_max
    return a.grid.forward(values, top)


def symbol_of(
    operator: Callable[[SpectralFn], np.ndarray], grid: EulerGrid, twice_l_max: int
) -> Symbol:
    """σ[A](x, l) = T^l(x)* (A T^l)(x); A maps batched spectra to batched grid samples."""
    blocks = {}
    for t in range(twice_l_max + 1):
        d = t + 1
        basis = np.zeros((d, d, d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                # T^l_{ij} has coefficient E_{ji}/(2l + 1)
                basis[i, j, j, i] = 1.0 / d
        image = operator(SpectralFn(t, {t: basis}))
        wig = _entry_matrices(grid, t)
        blocks[t] = np.einsum("...ki,...kj->...ij", wig.conj(), image)
    return Symbol(grid, blocks)


def compose(a: Symbol, b: Symbol, r: int = 2, ops: TaylorOperators | None = None) -> Symbol:
    """Σ_{|α| ≤ r} 𝐃^α a · X^{(α)} b on blocks 2l ≤ a.twice_l_max − r."""
    if not 0 <= r <= 2:
        raise ValueError(f"composition order must be 0, 1 or 2, got {r}")
    top = a.twice_l_max - r
    keys = [t for t in b.labels if t <= top]
    if not keys:
        raise IndexRangeError(f"no blocks left after a truncation margin of {r}")
    ops = ops or taylor_operators()
    result: dict[int, np.ndarray] = {}
    truncated = a.truncated or b.truncated
    for alpha in multi_indices(r):
        da = a.multi_difference(alpha)
        xb = b.restrict(keys).x_taylor(alpha, ops)
        for t in keys:
            if t not in da.blocks:
                continue
            term = da.blocks[t] @ xb.blocks[t]
            result[t] = result[t] + term if t in result else term
    for t in keys:
        result.setdefault(t, np.zeros((t + 1, t + 1), dtype=complex))
    return Symbol(a.grid, result, a.order + b.order, truncated)


def adjoint_symbol(a: Symbol, r: int = 2, ops: TaylorOperators | None = None) -> Symbol:
    """Σ_{|α| ≤ r} 𝐃^α X^{(α)} a* on blocks 2l ≤ a.twice_l_max − r."""
    if not 0 <= r <= 2:
        raise ValueError(f"adjoint order must be 0, 1 or 2, got {r}")
    top = a.twice_l_max - r
    if top < 0:
        raise IndexRangeError(f"no blocks left after a truncation margin of {r}")
    ops = ops or taylor_operators()
    star = a.star()
    result: dict[int, np.ndarray] = {}
    for alpha in multi_indices(r):
        term = star.x_taylor(alpha, ops).multi_difference(alpha)
        for t, block in term.blocks.items():
            if t > top:
                continue
            result[t] = result[t] + block if t in result else block
    return Symbol(a.grid, result, a.order, a.truncated)


def symbol_norm(a: Symbol, k: int, j: int, m: float) -> float:
    """sup_{x, l} ⟨l⟩^{|β| − m − |α|} ‖Π^α 𝐃^β a(x, l)‖_op over |α| ≤ k, |β| ≤ j."""
    best = 0.0
    for beta in multi_indices(j):
        db = a.multi_difference(beta)
        valid = [t for t in db.labels if t <= a.twice_l_max - sum(beta)]
        for alpha in multi_indices(k):
            if sum(alpha):
                term = db.restrict(valid).x_apply(
                    lambda label, alpha=alpha: sigma_power(alpha, label.twice_l)
                )
            else:
                term = db.restrict(valid)
            for t, block in term.blocks.items():
                size = RepLabel(t).size
                norm = float(np.max(np.linalg.norm(block, ord=2, axis=(-2, -1))))
                best = max(best, size ** (sum(beta) - m - sum(alpha)) * norm)
    return best


def symbol_to_dict(a: Symbol) -> dict[str, Any]:
    return {
        "grid": a.grid.ident,
        "order": a.order,
        "twice_l_max": a.twice_l_max,
        "blocks": {
            str(t): {"shape": list(b.shape), "data": interleave(b)}
            for t, b in sorted(a.blocks.items())
        },
    }


def grid_from_ident(ident: str) -> Grid:
    kind, _, dims = ident.partition(":")
    sizes = [int(x) for x in dims.split("x")]
    if kind == "euler" and len(sizes) == 3:
        return EulerGrid(*sizes)
    if kind == "sphere" and len(sizes) == 2:
        return SphereGrid(*sizes)
    raise ValueError(f"unknown grid id {ident!r}")


def symbol_from_dict(data: dict[str, Any]) -> Symbol:
    grid = grid_from_ident(str(data["grid"]))
    blocks = {
        int(t): deinterleave(entry["data"], tuple(entry["shape"]))
        for t, entry in (data.get("blocks") or {}).items()
    }
    return Symbol(grid, blocks, float(data.get("order", 0.0)))


def hermitian_function(a: Symbol, fn: Callable[[np.ndarray], np.ndarray]) -> Symbol:
    """f(a) blockwise for Hermitian blocks, through the eigendecomposition."""

    def one(_: RepLabel, block: np.ndarray) -> np.ndarray:
        w, v = np.linalg.eigh(block)
        return (v * fn(w)[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))

    return a.map(one)
