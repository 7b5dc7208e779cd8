"""Matrix elements of the irreducible representations of SU(2).

Entries are indexed in ascending order from −l; position i of a block holds index
i − l.  The representation T^l(x) is the product diag(e^{−inφ}) P^l(θ) diag(e^{−imψ}),
where P^l(θ) = exp(θ·σ[X₁]) is evaluated from the eigensystem of the real symmetric
generator σ₊ + σ₋.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from paragroup.domain.errors import IndexRangeError
from paragroup.domain.models import DiffTag, EulerPoint, RepLabel

_TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi


def index_values(twice_l: int) -> np.ndarray:
    """Indices −l, …, l as floats."""
    return (2.0 * np.arange(twice_l + 1) - twice_l) / 2.0


@lru_cache(maxsize=None)
def _sigma(tag: DiffTag, twice_l: int) -> np.ndarray:
    d = twice_l + 1
    tl = float(twice_l)
    twice_m = 2.0 * np.arange(d) - tl
    out = np.zeros((d, d), dtype=complex)
    if tag is DiffTag.ZERO:
        out[np.diag_indices(d)] = twice_m / 2.0
    elif tag is DiffTag.PLUS:
        # column m feeds row m + 1
        j = np.arange(d - 1)
        out[j + 1, j] = -np.sqrt((tl - twice_m[j]) * (tl + twice_m[j] + 2.0)) / 2.0
    else:
        j = np.arange(1, d)
        out[j - 1, j] = -np.sqrt((tl + twice_m[j]) * (tl - twice_m[j] + 2.0)) / 2.0
    out.setflags(write=False)
    return out


def sigma(tag: DiffTag | str, label: RepLabel | int) -> np.ndarray:
    """Symbol of Π₊, Π₋ or Π₀ at representation l."""
    twice_l = label.twice_l if isinstance(label, RepLabel) else int(label)
    if twice_l < 0:
        raise IndexRangeError(f"twice_l must be nonnegative, got {twice_l}")
    return _sigma(DiffTag(tag), twice_l).copy()


def frame_symbol(j: int, label: RepLabel | int) -> np.ndarray:
    """Symbol of the left-invariant frame field X_j (j = 1, 2, 3)."""
    plus = sigma(DiffTag.PLUS, label)
    minus = sigma(DiffTag.MINUS, label)
    if j == 1:
        return -0.5j * (plus + minus)
    if j == 2:
        return 0.5 * (minus - plus)
    if j == 3:
        return -1j * sigma(DiffTag.ZERO, label)
    raise IndexRangeError(f"frame index must be 1, 2 or 3, got {j}")


def laplace_multiplier(label: RepLabel) -> float:
    return -label.casimir


@lru_cache(maxsize=None)
def _generator_eigensystem(twice_l: int) -> tuple[np.ndarray, np.ndarray]:
    k = (_sigma(DiffTag.PLUS, twice_l) + _sigma(DiffTag.MINUS, twice_l)).real
    kappa, vectors = np.linalg.eigh(k)
    # the spectrum of σ₊ + σ₋ is {−2m}; snapping keeps the phases exact
    kappa = np.rint(kappa)
    vectors.setflags(write=False)
    return kappa, vectors


def wigner_small(twice_l: int, theta: np.ndarray | float) -> np.ndarray:
    """P^l(θ) for an array of angles; result shape (*theta.shape, d, d)."""
    kappa, vectors = _generator_eigensystem(int(twice_l))
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(-0.5j * theta[..., None] * kappa)
    return np.einsum("ik,...k,jk->...ij", vectors, phase, vectors)


def wigner_matrix(
    label: RepLabel | int,
    phi: np.ndarray | float,
    theta: np.ndarray | float,
    psi: np.ndarray | float,
) -> np.ndarray:
    """T^l at (broadcast) Euler angles; result shape (*broadcast, d, d)."""
    twice_l = label.twice_l if isinstance(label, RepLabel) else int(label)
    phi, theta, psi = np.broadcast_arrays(
        np.asarray(phi, dtype=float), np.asarray(theta, dtype=float), np.asarray(psi, dtype=float)
    )
    n = index_values(twice_l)
    small = wigner_small(twice_l, theta)
    left = np.exp(-1j * phi[..., None] * n)
    right = np.exp(-1j * psi[..., None] * n)
    return left[..., :, None] * small * right[..., None, :]


def wigner_at(label: RepLabel, x: EulerPoint) -> np.ndarray:
    return wigner_matrix(label, x.phi, x.theta, x.psi)


def wigner_entry(label: RepLabel, n: float, m: float, x: EulerPoint) -> complex:
    i = label.position(n)
    j = label.position(m)
    return complex(wigner_at(label, x)[i, j])


def wigner_entry_reference(label: RepLabel, n: float, m: float, theta: float) -> complex:
    """P^l_{nm}(θ) from the Rodrigues-type derivative formula; used to cross-check small l."""
    label.position(n), label.position(m)
    l = label.l
    z = math.cos(theta)
    lm_minus, lm_plus = round(l - m), round(l + m)
    ln_minus, ln_plus = round(l - n), round(l + n)
    poly = Polynomial([1.0, -1.0]) ** lm_minus * Polynomial([1.0, 1.0]) ** lm_plus
    value = poly.deriv(ln_minus)(z) if ln_minus > 0 else poly(z)
    prefactor = (
        2.0 ** (-l)
        * (-1.0) ** lm_minus
        * (1j ** round(m - n))
        / math.sqrt(math.factorial(lm_minus) * math.factorial(lm_plus))
        * math.sqrt(math.factorial(ln_plus) / math.factorial(ln_minus))
    )
    weight = (1.0 - z) ** ((m - n) / 2.0) * (1.0 + z) ** (-(m + n) / 2.0)
    return complex(prefactor * weight * value)


def euler_to_su2(x: EulerPoint) -> np.ndarray:
    return wigner_matrix(1, x.phi, x.theta, x.psi)


def su2_to_euler(u: np.ndarray) -> EulerPoint:
    """Euler angles of a unitary 2×2 matrix [[a, b], [−b̄, ā]] on the half-open chart."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise IndexRangeError(f"expected a 2x2 matrix, got shape {u.shape}")
    a, b = complex(u[0, 0]), complex(u[0, 1])
    theta = 2.0 * math.atan2(abs(b), abs(a))
    arg_a = math.atan2(a.imag, a.real) if abs(a) > 0 else 0.0
    arg_b = math.atan2(b.imag, b.real) if abs(b) > 0 else 0.0
    phi = arg_a + arg_b - math.pi / 2.0
    psi = arg_a - arg_b + math.pi / 2.0
    shift = _TWO_PI * math.floor(phi / _TWO_PI)
    phi -= shift
    psi -= shift
    psi = (psi + _TWO_PI) % _FOUR_PI - _TWO_PI
    # floating round-off can land exactly on the open end of a chart interval
    if phi >= _TWO_PI:
        phi -= _TWO_PI
    if psi >= _TWO_PI:
        psi -= _FOUR_PI
    return EulerPoint(phi, min(max(theta, 0.0), math.pi), psi)


def group_multiply(x: EulerPoint, y: EulerPoint) -> EulerPoint:
    return su2_to_euler(euler_to_su2(x) @ euler_to_su2(y))


def group_inverse(x: EulerPoint) -> EulerPoint:
    return su2_to_euler(euler_to_su2(x).conj().T)


def fundamental_tuple(u: np.ndarray) -> tuple[complex, complex, complex]:
    """(q₊, q₋, q₀) of a 2×2 unitary, vanishing at the identity."""
    x1, x2 = complex(u[0, 0]), complex(u[0, 1])
    return -x2.conjugate(), x2, x1 - x1.conjugate()


def sphere_point(
    theta: np.ndarray | float, psi: np.ndarray | float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Point of S² with polar angle θ and azimuth ψ, componentwise over arrays."""
    theta = np.asarray(theta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    return np.sin(theta) * np.cos(psi), np.sin(theta) * np.sin(psi), np.cos(theta)


def hopf_project(x: EulerPoint) -> np.ndarray:
    """Unit vector of S² under x; φ is the T₃ fibre coordinate and drops out."""
    return np.array(sphere_point(x.theta, x.psi), dtype=float)
