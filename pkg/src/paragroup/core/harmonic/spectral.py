from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from paragroup.domain.errors import IndexRangeError, InvarianceError
from paragroup.domain.models import RepLabel


@dataclass(slots=True)
class SpectralFn:
    """Fourier coefficients f̂(l) for 0 ≤ 2l ≤ twice_l_max.

    Each block has shape (*batch, d, d) with d = 2l + 1; missing blocks are zero.
    """

    twice_l_max: int
    blocks: dict[int, np.ndarray] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self) -> None:
        if self.twice_l_max < 0:
            raise IndexRangeError(f"twice_l_max must be nonnegative, got {self.twice_l_max}")
        for twice_l, block in self.blocks.items():
            if twice_l < 0 or twice_l > self.twice_l_max:
                raise IndexRangeError(f"block 2l={twice_l} outside [0, {self.twice_l_max}]")
            d = twice_l + 1
            if block.shape[-2:] != (d, d):
                raise IndexRangeError(f"block 2l={twice_l} has shape {block.shape}, expected d={d}")

    @classmethod
    def zeros(cls, twice_l_max: int, batch: tuple[int, ...] = ()) -> "SpectralFn":
        return cls(
            twice_l_max,
            {t: np.zeros((*batch, t + 1, t + 1), dtype=complex) for t in range(twice_l_max + 1)},
        )

    @classmethod
    def from_multiplier(
        cls, twice_l_max: int, fn: Callable[[RepLabel], np.ndarray | complex]
    ) -> "SpectralFn":
        blocks = {}
        for t in range(twice_l_max + 1):
            value = np.asarray(fn(RepLabel(t)), dtype=complex)
            if value.ndim == 0:
                value = value * np.eye(t + 1, dtype=complex)
            blocks[t] = value
        return cls(twice_l_max, blocks)

    @classmethod
    def random(
        cls,
        twice_l_max: int,
        rng: np.random.Generator,
        *,
        integer_only: bool = False,
        decay: float = 0.0,
    ) -> "SpectralFn":
        blocks = {}
        for t in range(twice_l_max + 1):
            if integer_only and t % 2:
                continue
            d = t + 1
            scale = (1.0 + RepLabel(t).casimir) ** (-decay / 2.0) / d
            blocks[t] = scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        return cls(twice_l_max, blocks)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        for block in self.blocks.values():
            return block.shape[:-2]
        return ()

    def block(self, twice_l: int) -> np.ndarray:
        if twice_l < 0:
            raise IndexRangeError(f"twice_l must be nonnegative, got {twice_l}")
        found = self.blocks.get(twice_l)
        if found is not None:
            return found
        d = twice_l + 1
        return np.zeros((*self.batch_shape, d, d), dtype=complex)

    def copy(self) -> "SpectralFn":
        return SpectralFn(self.twice_l_max, {t: b.copy() for t, b in self.blocks.items()})

    def truncate(self, twice_l_max: int) -> "SpectralFn":
        return SpectralFn(
            twice_l_max, {t: b for t, b in self.blocks.items() if t <= twice_l_max}
        )

    def map_blocks(self, fn: Callable[[RepLabel, np.ndarray], np.ndarray]) -> "SpectralFn":
        return SpectralFn(
            self.twice_l_max, {t: fn(RepLabel(t), b) for t, b in self.blocks.items()}
        )

    def multiply(self, fn: Callable[[RepLabel], float | complex]) -> "SpectralFn":
        """Apply a scalar Fourier multiplier m(l)."""
        return self.map_blocks(lambda label, b: fn(label) * b)

    def left_multiply(self, fn: Callable[[RepLabel], np.ndarray]) -> "SpectralFn":
        """f̂(l) ↦ a(l) f̂(l), the action of the invariant operator with symbol a."""
        return self.map_blocks(lambda label, b: fn(label) @ b)

    def _combine(self, other: "SpectralFn", sign: float) -> "SpectralFn":
        top = max(self.twice_l_max, other.twice_l_max)
        keys = sorted(set(self.blocks) | set(other.blocks))
        return SpectralFn(top, {t: self.block(t) + sign * other.block(t) for t in keys})

    def __add__(self, other: "SpectralFn") -> "SpectralFn":
        return self._combine(other, 1.0)

    def __sub__(self, other: "SpectralFn") -> "SpectralFn":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> "SpectralFn":
        return SpectralFn(self.twice_l_max, {t: scalar * b for t, b in self.blocks.items()})

    __rmul__ = __mul__

    def hs_norms(self) -> dict[int, float]:
        return {
            t: float(np.sqrt(np.sum(np.abs(b) ** 2))) for t, b in sorted(self.blocks.items())
        }

    def sobolev_norm(self, s: float = 0.0) -> float:
        total = 0.0
        for t, b in self.blocks.items():
            label = RepLabel(t)
            total += label.dim * label.size ** (2 * s) * float(np.sum(np.abs(b) ** 2))
        return float(np.sqrt(total))

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(b))) for b in self.blocks.values()), default=0.0)

    def invariance_violation(self) -> tuple[float, tuple[float, float, float]]:
        """Largest |entry| off the n = 0 column and its (l, n, m)."""
        worst, where = 0.0, (0.0, 0.0, 0.0)
        for t, b in sorted(self.blocks.items()):
            off = np.abs(b)
            if off.size == 0:
                continue
            if t % 2 == 0:
                off = off.copy()
                off[..., t // 2] = 0.0
            idx = np.unravel_index(int(np.argmax(off)), off.shape)
            value = float(off[idx])
            if value > worst:
                half = t / 2
                worst, where = value, (half, idx[-1] - half, idx[-2] - half)
        return worst, where

    def is_t3_invariant(self, tol: float = 1e-10) -> bool:
        """True when only integer blocks with a nonzero n = 0 column carry mass."""
        worst, _ = self.invariance_violation()
        return worst <= tol * max(self.max_abs(), 1.0)

    def require_t3_invariant(self, context: str = "spectrum", tol: float = 1e-10) -> None:
        if self.is_t3_invariant(tol):
            return
        worst, (l, n, m) = self.invariance_violation()
        raise InvarianceError(
            f"{context} is not T3-invariant: |entry| {worst:.3e} off the n = 0 column "
            f"at (l, n, m) = ({l:g}, {n:g}, {m:g})",
            largest=worst,
            where=(l, n, m),
        )


def sobolev_norm(a: SpectralFn, s: float = 0.0) -> float:
    return a.sobolev_norm(s)
