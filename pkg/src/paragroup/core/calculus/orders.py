"""Band-decay fits for truncated composition, adjoint and cutoff changes.

Every operator here is built from symbols c(x)·M(l), for which Op(cM)f = c·Op(M)f.
Each expansion term keeps that form, so residuals are grid products of band-limited
functions and never need x-dependent symbol tables at the input band.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from paragroup.core.calculus.diffops import multi_difference
from paragroup.core.calculus.paradiff import AdmissibleCutoff
from paragroup.core.calculus.taylor import TaylorOperators, multi_indices
from paragroup.core.harmonic.grids import EulerGrid
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.domain.errors import IndexRangeError, ParagroupError
from paragroup.domain.models import RepLabel

logger = logging.getLogger(__name__)

# composition inputs are multiplied by a smooth field of this 2l band
FIELD_BAND = 3


@dataclass(frozen=True, slots=True)
class DecayFit:
    name: str
    twice_labels: tuple[int, ...]
    residuals: tuple[float, ...]
    exponent: float
    expected: float

    @property
    def deviation(self) -> float:
        return abs(self.exponent - self.expected)


def fit_exponent(twice_labels: Sequence[int], residuals: Sequence[float]) -> float:
    """Least-squares slope of log residual against log ⟨l⟩."""
    sizes = np.array([RepLabel(t).size for t in twice_labels])
    values = np.asarray(residuals, dtype=float)
    if sizes.size < 2 or sizes.size != values.size:
        raise ParagroupError(
            f"need two or more matching samples, got {sizes.size} bands"
            f" and {values.size} residuals",
            reason="decay_fit",
        )
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise ParagroupError("residuals must be positive and finite", reason="decay_fit")
    slope, _ = np.polyfit(np.log(sizes), np.log(values), 1)
    return float(slope)


def sample_bands(l_max: float, count: int = 5) -> tuple[int, ...]:
    """2l values spaced geometrically over [max(2, 3 l_max / 8), l_max]."""
    if l_max < 3:
        raise IndexRangeError(f"decay fits need l_max >= 3, got {l_max}")
    low = max(2.0, 0.375 * l_max)
    twice = np.unique(np.round(2.0 * np.geomspace(low, l_max, count)).astype(int))
    return tuple(int(t) for t in twice)


def _random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def unit_input(twice_l: int, rng: np.random.Generator) -> SpectralFn:
    """Single-block f with unitary coefficient pattern and ‖f‖_{L²} = 1."""
    d = twice_l + 1
    return SpectralFn(twice_l, {twice_l: _random_unitary(d, rng) / d})


def rough_field(twice_band: int, regularity: float, rng: np.random.Generator) -> SpectralFn:
    """Field with ‖ĉ(l)‖_HS = ⟨l⟩^{−regularity−1}.

    Its L² band pieces at frequency N then scale as N^{−regularity}.
    """
    blocks = {}
    for t in range(twice_band + 1):
        label = RepLabel(t)
        pattern = _random_unitary(label.dim, rng) / math.sqrt(label.dim)
        blocks[t] = label.size ** (-regularity - 1.0) * pattern
    return SpectralFn(twice_band, blocks)


def cutoff_band(chi: AdmissibleCutoff, twice_l: int) -> int:
    """Largest 2η with χ(η, l) allowed to be nonzero, i.e. |η| < δ⟨l⟩."""
    bound = chi.delta * RepLabel(twice_l).size
    t = 0
    while RepLabel(t + 1).frequency < bound:
        t += 1
    return t


def _l2(grid: EulerGrid, values: np.ndarray) -> float:
    return float(np.sqrt(max(float(np.real(grid.integrate(np.abs(values) ** 2))), 0.0)))


def _multiplier_op(multiplier: SpectralFn):
    def one(label: RepLabel) -> np.ndarray:
        return multiplier.block(label.twice_l)

    return one


def _check_margin(multiplier: SpectralFn, needed: int) -> None:
    if multiplier.twice_l_max < needed:
        raise IndexRangeError(
            f"multiplier stops at 2l={multiplier.twice_l_max}, expansion needs {needed}"
        )


def _expansion_residuals(
    grid: EulerGrid,
    multiplier: SpectralFn,
    c: np.ndarray,
    c_band: int,
    twice_labels: Sequence[int],
    ops: TaylorOperators,
    rng: np.random.Generator,
) -> np.ndarray:
    """‖(Op(M)∘c − Σ_{|α| ≤ r} Op(𝐃^α M · X^{(α)}c)) f‖.

    Rows are the truncation orders r, columns the input bands.
    """
    _check_margin(multiplier, max(twice_labels) + c_band + ops.order + 1)
    indices = multi_indices(ops.order)
    taylor = {alpha: ops.apply_values(alpha, grid, c) for alpha in indices}
    diffs = {alpha: multi_difference(alpha, multiplier) for alpha in indices}
    act = _multiplier_op(multiplier)
    out = np.zeros((ops.order + 1, len(twice_labels)))
    for col, t in enumerate(twice_labels):
        f = unit_input(t, rng)
        product = grid.forward(c * grid.inverse(f), t + c_band)
        exact = grid.inverse(product.left_multiply(act))
        by_order = [np.zeros_like(exact) for _ in range(ops.order + 1)]
        for alpha in indices:
            moved = SpectralFn(t, {t: diffs[alpha].block(t) @ f.blocks[t]})
            by_order[sum(alpha)] += taylor[alpha] * grid.inverse(moved)
        partial = np.zeros_like(exact)
        for r, term in enumerate(by_order):
            partial = partial + term
            out[r, col] = _l2(grid, exact - partial)
    return out


def composition_residuals(
    multiplier: SpectralFn,
    field: SpectralFn,
    twice_labels: Sequence[int],
    ops: TaylorOperators,
    rng: np.random.Generator,
    grid: EulerGrid | None = None,
) -> np.ndarray:
    """Truncation residuals of compose(M, c) for the invariant M and the field c.

    Row r holds ‖(Op(M)∘c − Op(compose(M, c, r)))f‖ at each input band.
    """
    grid = grid or EulerGrid.for_band(max(twice_labels) + field.twice_l_max)
    c = grid.inverse(field)
    return _expansion_residuals(grid, multiplier, c, field.twice_l_max, twice_labels, ops, rng)


def adjoint_residuals(
    multiplier: SpectralFn,
    field: SpectralFn,
    twice_labels: Sequence[int],
    ops: TaylorOperators,
    rng: np.random.Generator,
    grid: EulerGrid | None = None,
) -> np.ndarray:
    """Truncation residuals of adjoint_symbol(c·M).

    Op(cM)* = Op(M*)∘c̄ and the expansion terms are X^{(α)}c̄ · 𝐃^α M*.
    """
    grid = grid or EulerGrid.for_band(max(twice_labels) + field.twice_l_max)
    c = np.conj(grid.inverse(field))
    star = multiplier.map_blocks(lambda _, b: np.conj(b.T))
    return _expansion_residuals(grid, star, c, field.twice_l_max, twice_labels, ops, rng)


def cutoff_residuals(
    multiplier: SpectralFn,
    field: SpectralFn,
    low: AdmissibleCutoff,
    high: AdmissibleCutoff,
    twice_labels: Sequence[int],
    rng: np.random.Generator,
    grid: EulerGrid | None = None,
) -> np.ndarray:
    """‖(T^{low}_{cM} − T^{high}_{cM})f‖ at each input band."""
    _check_margin(multiplier, max(twice_labels))
    grid = grid or EulerGrid.for_band(max(twice_labels) + field.twice_l_max)
    act = _multiplier_op(multiplier)
    out = np.zeros(len(twice_labels))
    for col, t in enumerate(twice_labels):
        f = unit_input(t, rng)
        lam = RepLabel(t).frequency

        def gap(eta: RepLabel) -> float:
            return float(low(eta.frequency, lam) - high(eta.frequency, lam))

        moved = grid.inverse(f.left_multiply(act))
        out[col] = _l2(grid, grid.inverse(field.multiply(gap)) * moved)
    return out


def expansion_fits(
    l_max: float, ops: TaylorOperators, rng: np.random.Generator, order: float = 1.0
) -> list[DecayFit]:
    """Fitted decay of compose and adjoint truncations for M = ⟨l⟩^order·Id.

    The residual of an r-term truncation has order `order − r − 1`.
    """
    labels = sample_bands(l_max)
    multiplier = SpectralFn.from_multiplier(
        max(labels) + FIELD_BAND + ops.order + 1, lambda label: label.size**order
    )
    field = SpectralFn.random(FIELD_BAND, rng, decay=2.0)
    grid = EulerGrid.for_band(max(labels) + FIELD_BAND)
    runs = {
        "compose": composition_residuals(multiplier, field, labels, ops, rng, grid),
        "adjoint": adjoint_residuals(multiplier, field, labels, ops, rng, grid),
    }
    fits = []
    for name, rows in runs.items():
        for r, row in enumerate(rows):
            fit = DecayFit(
                f"{name}_r{r}",
                labels,
                tuple(float(v) for v in row),
                fit_exponent(labels, row),
                order - r - 1.0,
            )
            logger.info(
                f"[Decay] {fit.name}: exponent {fit.exponent:.3f}, expected {fit.expected:.1f}"
            )
            fits.append(fit)
    return fits


def cutoff_fit(
    l_max: float,
    low: AdmissibleCutoff,
    high: AdmissibleCutoff,
    rng: np.random.Generator,
    order: float = 1.0,
    regularity: float = 2.0,
) -> DecayFit:
    """Fitted decay of T^{low} − T^{high} for c·⟨l⟩^order with c of the given regularity.

    The difference has order `order − regularity`.
    """
    if low.delta >= high.delta:
        raise ValueError(f"need low.delta < high.delta, got {low.delta} and {high.delta}")
    labels = sample_bands(l_max)
    band = cutoff_band(high, max(labels))
    multiplier = SpectralFn.from_multiplier(max(labels), lambda label: label.size**order)
    field = rough_field(band, regularity, rng)
    residuals = cutoff_residuals(multiplier, field, low, high, labels, rng)
    fit = DecayFit(
        "cutoff",
        labels,
        tuple(float(v) for v in residuals),
        fit_exponent(labels, residuals),
        order - regularity,
    )
    logger.info(f"[Decay] cutoff: exponent {fit.exponent:.3f}, expected {fit.expected:.1f}")
    return fit
