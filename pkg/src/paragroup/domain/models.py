from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from paragroup.domain.errors import IndexRangeError


class DiffTag(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"


class DnMode(str, Enum):
    ORACLE = "oracle"
    PARA = "para"


class CutoffRule(str, Enum):
    SHARP = "sharp"
    INTEGRAL = "integral"


class Scheme(str, Enum):
    RK4 = "rk4"


DIFF_TAGS: tuple[DiffTag, ...] = (DiffTag.PLUS, DiffTag.MINUS, DiffTag.ZERO)


@dataclass(frozen=True, slots=True, order=True)
class RepLabel:
    """Irreducible representation of SU(2), stored as 2l so half-integers stay exact."""

    twice_l: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice_l, int) or self.twice_l < 0:
            raise IndexRangeError(f"twice_l must be a nonnegative integer, got {self.twice_l!r}")

    @classmethod
    def of(cls, l: float) -> "RepLabel":
        twice = round(2 * l)
        if abs(twice - 2 * l) > 1e-12:
            raise IndexRangeError(f"l must be a half-integer, got {l}")
        return cls(int(twice))

    @property
    def l(self) -> float:
        return self.twice_l / 2

    @property
    def dim(self) -> int:
        return self.twice_l + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_l % 2 == 0

    @property
    def casimir(self) -> float:
        """l(l+1), the eigenvalue of -Δ on the entries of this representation."""
        return self.l * (self.l + 1)

    @property
    def size(self) -> float:
        """Japanese bracket ⟨l⟩ = (1 + l(l+1))^{1/2}."""
        return math.sqrt(1.0 + self.casimir)

    @property
    def frequency(self) -> float:
        """|ξ| = (l(l+1))^{1/2}, the symbol of |∇|."""
        return math.sqrt(self.casimir)

    def indices(self) -> tuple[float, ...]:
        return tuple((2 * i - self.twice_l) / 2 for i in range(self.dim))

    def position(self, n: float) -> int:
        """Array position of index n ∈ {−l, …, l}."""
        twice_n = round(2 * n)
        if abs(twice_n - 2 * n) > 1e-12:
            raise IndexRangeError(f"index {n} is not a half-integer")
        if (twice_n - self.twice_l) % 2 != 0:
            raise IndexRangeError(f"index {n} has the wrong parity for l={self.l}")
        if abs(twice_n) > self.twice_l:
            raise IndexRangeError(f"index {n} out of range for l={self.l}")
        return (twice_n + self.twice_l) // 2


def labels(twice_l_max: int) -> list[RepLabel]:
    return [RepLabel(t) for t in range(twice_l_max + 1)]


@dataclass(frozen=True, slots=True)
class EulerPoint:
    phi: float
    theta: float
    psi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.phi < 2 * math.pi):
            raise IndexRangeError(f"phi must lie in [0, 2π), got {self.phi}")
        if not (0.0 <= self.theta <= math.pi):
            raise IndexRangeError(f"theta must lie in [0, π], got {self.theta}")
        if not (-2 * math.pi <= self.psi < 2 * math.pi):
            raise IndexRangeError(f"psi must lie in [−2π, 2π), got {self.psi}")

    @property
    def singular(self) -> bool:
        return self.theta == 0.0 or self.theta == math.pi


IDENTITY = EulerPoint(0.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class CheckResult:
    suite: str
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.value) and self.value <= self.tolerance)


@dataclass(frozen=True, slots=True)
class ConservedQuantities:
    volume: float
    area: float
    kinetic: float
    momentum: tuple[float, float, float]
    center: tuple[float, float, float]

    @property
    def hamiltonian(self) -> float:
        return self.area + self.kinetic
