"""Capillary water waves on a ball: (ζ, φ) ↦ (D[ζ]φ, quadratic terms − (H(ζ) + p_e)).

Nondimensional units with surface tension over density equal to one. The static ball
ζ = 0 balances the exterior pressure p_e = −2.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from paragroup.core.calculus.paradiff import AdmissibleCutoff, para_op
from paragroup.core.calculus.symbols import Symbol, adjoint_symbol, compose
from paragroup.core.calculus.taylor import taylor_operators
from paragroup.core.harmonic.grids import SphereGrid
from paragroup.core.harmonic.representation import sphere_point
from paragroup.core.harmonic.spherical import SphFn, lift, project
from paragroup.core.water.dno import (
    build_factorization,
    eigensystem,
    good_unknown,
    oracle_dn,
    paralinearized_dn,
)
from paragroup.core.water.geometry import (
    FRAME,
    SurfaceState,
    cartesian_gradient,
    coordinate_functions,
    curvature_symbol,
    mean_curvature_values,
    surface_grid,
)
from paragroup.domain.errors import AdmissibilityError, SylvesterError
from paragroup.domain.models import ConservedQuantities, DnMode, RepLabel, Scheme

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi


def linear_frequency(n: int) -> float:
    """Λ(n) = (n(n − 1)(n + 2))^{1/2}; zero on degrees 0 and 1."""
    return math.sqrt(max(n * (n - 1) * (n + 2), 0))


@dataclass(frozen=True, slots=True)
class WaveState:
    zeta: SphFn
    phi: SphFn
    t: float = 0.0

    def shifted(self, dzeta: SphFn, dphi: SphFn, h: float) -> "WaveState":
        return WaveState(self.zeta + dzeta * h, self.phi + dphi * h, self.t + h)


@dataclass(frozen=True, slots=True)
class SymmetrizerSet:
    gamma_principal: Symbol
    gamma_sub: Symbol
    p_principal: Symbol
    p_sub: Symbol
    q: Symbol
    q_values: np.ndarray

    @property
    def gamma(self) -> Symbol:
        return self.gamma_principal + self.gamma_sub

    @property
    def p(self) -> Symbol:
        return self.p_principal + self.p_sub


def _grid_integral(grid: SphereGrid, values: np.ndarray) -> float:
    return float(np.real(grid.integrate(values)))


def _omega(grid: SphereGrid) -> np.ndarray:
    theta, psi = grid.points()
    return np.stack(sphere_point(theta, psi))


def momentum_vector(zeta: SphFn, phi: SphFn, grid: SphereGrid) -> np.ndarray:
    """∫ φ N dS = 4π∫ φ R(Rω − ∇₀R) dμ₀."""
    r = 1.0 + zeta.real_values(grid)
    field_ = r * (r * _omega(grid) - cartesian_gradient(zeta, grid))
    phi_v = phi.real_values(grid)
    return np.array([FOUR_PI * _grid_integral(grid, phi_v * c) for c in field_])


def center_integral(zeta: SphFn, grid: SphereGrid) -> np.ndarray:
    r = 1.0 + zeta.real_values(grid)
    return np.array([FOUR_PI * _grid_integral(grid, r**4 * c) for c in _omega(grid)])


def center_of_mass_frame(
    zeta: SphFn,
    phi: SphFn,
    grid: SphereGrid | None = None,
    *,
    iterations: int = 20,
    tol: float = 1e-13,
) -> tuple[SphFn, SphFn]:
    """Shift the degree-one parts so the center integral and the momentum vanish."""
    l_max = max(zeta.l_max, phi.l_max, 1)
    grid = grid or surface_grid(l_max)
    coords = [c.resize(l_max) for c in coordinate_functions()]
    zeta = zeta.resize(l_max)
    phi = phi.resize(l_max)
    # center ≈ (16π/3)·(degree-one part) for small ζ
    for _ in range(iterations):
        center = center_integral(zeta, grid)
        if float(np.max(np.abs(center))) < tol:
            break
        for k in range(3):
            zeta = zeta - coords[k] * (center[k] / (16.0 * math.pi / 3.0))
    # the momentum is linear in φ
    basis = np.stack([momentum_vector(zeta, c, grid) for c in coords], axis=1)
    shift = np.linalg.solve(basis, momentum_vector(zeta, phi, grid))
    for k in range(3):
        phi = phi - coords[k] * shift[k]
    return zeta.real_part(), phi.real_part()


@dataclass(slots=True)
class WaveSystem:
    l_max: int
    dn_mode: DnMode = DnMode.ORACLE
    pressure: float = -2.0
    cfl: float = 2.0
    n_max: int | None = None
    cond_threshold: float = 1e12
    residual_tolerance: float = 1e-6
    chi: AdmissibleCutoff = field(default_factory=AdmissibleCutoff)
    gap_log2: float = 10.0
    smallness: float | None = 0.1
    scheme: Scheme = Scheme.RK4
    grid: SphereGrid = field(init=False)

    def __post_init__(self) -> None:
        if self.l_max < 2:
            raise ValueError(f"l_max must be at least 2, got {self.l_max}")
        self.dn_mode = DnMode(self.dn_mode)
        self.scheme = Scheme(self.scheme)
        self.grid = surface_grid(self.l_max)

    # ------------------------------------------------------------------
    # Right-hand side

    def oracle(self, state: WaveState) -> SphFn:
        if not np.any(state.phi.coeffs):
            return SphFn.zeros(self.l_max)
        return oracle_dn(
            state.zeta,
            state.phi,
            n_max=self.n_max,
            cond_threshold=self.cond_threshold,
            residual_tolerance=self.residual_tolerance,
            l_max=self.l_max,
        ).value

    def dn(self, state: WaveState) -> SphFn:
        if self.dn_mode is DnMode.ORACLE:
            return self.oracle(state)
        if not np.any(state.phi.coeffs):
            return SphFn.zeros(self.l_max)
        return paralinearized_dn(
            state.zeta,
            state.phi.resize(self.l_max),
            chi=self.chi,
            gap_log2=self.gap_log2,
            grid=self.grid,
            smallness=self.smallness,
        ).value

    def rhs(self, state: WaveState) -> tuple[SphFn, SphFn]:
        grid = self.grid
        surface = SurfaceState.build(state.zeta, grid)
        dzeta = self.dn(state).resize(self.l_max)
        d = dzeta.real_values(grid)
        r2 = surface.rho**2
        dphi = np.stack([state.phi.frame_derivative(j).real_values(grid) for j in FRAME])
        g_phi = np.sum(dphi**2, axis=0)
        cross = np.sum(surface.frame * dphi, axis=0)
        quadratic = -g_phi / (2.0 * r2) + (r2 * d + cross) ** 2 / (2.0 * surface.beta1 * r2)
        values = quadratic - (mean_curvature_values(surface) + self.pressure)
        dphi_dt = SphFn.from_values(values, grid, self.l_max).real_part()
        dphi_dt.set(0, 0, 0.0)
        return dzeta, dphi_dt

    # ------------------------------------------------------------------
    # Time stepping

    @property
    def dt_limit(self) -> float:
        return self.cfl * self.l_max ** (-1.5)

    def check_dt(self, dt: float) -> None:
        if not (0.0 < dt <= self.dt_limit):
            raise AdmissibilityError(
                f"dt={dt:g} outside (0, {self.dt_limit:.3g}] for l_max={self.l_max}, cfl={self.cfl}"
            )

    def _rk4(self, state: WaveState, dt: float) -> WaveState:
        k1 = self.rhs(state)
        k2 = self.rhs(state.shifted(*k1, dt / 2.0))
        k3 = self.rhs(state.shifted(*k2, dt / 2.0))
        k4 = self.rhs(state.shifted(*k3, dt))
        dzeta = k1[0] + (k2[0] + k3[0]) * 2.0 + k4[0]
        dphi = k1[1] + (k2[1] + k3[1]) * 2.0 + k4[1]
        h = dt / 6.0
        return WaveState(state.zeta + dzeta * h, state.phi + dphi * h, state.t + dt)

    def step(self, state: WaveState, dt: float) -> WaveState:
        """One step of `scheme`; rejected when the new surface leaves the admissible shell."""
        self.check_dt(dt)
        steppers = {Scheme.RK4: self._rk4}
        new = steppers[self.scheme](state, dt)
        peak = float(np.max(np.abs(new.zeta.real_values(self.grid))))
        if peak >= 0.5:
            raise AdmissibilityError(f"step to t={new.t:.4f} would push |zeta| to {peak:.3f}")
        return new

    def run(self, state: WaveState, dt: float, steps: int, every: int = 1) -> Iterator[WaveState]:
        """Yield the initial state and then every `every`-th step."""
        if every < 1:
            raise ValueError(f"every must be positive, got {every}")
        self.check_dt(dt)
        state = WaveState(state.zeta.resize(self.l_max), state.phi.resize(self.l_max), state.t)
        yield state
        for k in range(1, steps + 1):
            state = self.step(state, dt)
            if k % every == 0 or k == steps:
                logger.debug(f"[Waves] t={state.t:.4f} step {k}/{steps}")
                yield state

    # ------------------------------------------------------------------
    # Diagnostics

    def conserved(self, state: WaveState) -> ConservedQuantities:
        grid = self.grid
        surface = SurfaceState.build(state.zeta, grid)
        r = surface.rho
        d = self.oracle(state).real_values(grid)
        volume = FOUR_PI / 3.0 * _grid_integral(grid, r**3)
        area = FOUR_PI * _grid_integral(grid, r * surface.width)
        kinetic = 0.5 * FOUR_PI * _grid_integral(grid, r**2 * state.phi.real_values(grid) * d)
        momentum = momentum_vector(state.zeta, state.phi, grid)
        center = center_integral(state.zeta, grid)
        return ConservedQuantities(
            volume,
            area,
            kinetic,
            tuple(float(x) for x in momentum),
            tuple(float(x) for x in center),
        )

    def symmetrizer(self, state: WaveState) -> SymmetrizerSet:
        """γ = γ₁.₅ + γ₀.₅, p = p₀.₅ + p₋₀.₅ and q with T_γ² ≈ sym(T_hT_λ), T_pT_λ ≈ T_γT_q."""
        grid = self.grid
        surface = SurfaceState.build(state.zeta, grid)
        top = 2 * self.l_max + 6
        labels = list(range(top + 1))
        factor = build_factorization(surface, labels, smallness=self.smallness)
        lam = factor.symbol("lambda")
        h = curvature_symbol(surface, labels)
        ops = taylor_operators()

        rotations = {}
        gamma_blocks = {}
        scale = surface.rho ** (-1.5) * surface.beta1 ** (-0.75)
        for t in labels:
            if t == 0:
                gamma_blocks[t] = np.zeros((*grid.shape, 1, 1), dtype=complex)
                continue
            eig = eigensystem(surface, t)
            g = scale[..., None] * eig.root**1.5
            rotations[t] = (eig.vectors, g)
            gamma_blocks[t] = eig.matrix(g.astype(complex))
        gamma15 = Symbol(grid, gamma_blocks, order=1.5)

        symmetric = (compose(h, lam, 1, ops) + compose(
            adjoint_symbol(lam, 1, ops), adjoint_symbol(h, 1, ops), 1, ops
        )).scale(0.5)
        s2 = symmetric - compose(gamma15, gamma15, 1, ops)
        sub_blocks = {}
        for t in s2.labels:
            if t == 0:
                sub_blocks[t] = np.zeros((*grid.shape, 1, 1), dtype=complex)
                continue
            vectors, g = rotations[t]
            vh = np.conj(np.swapaxes(vectors, -1, -2))
            gap = g[..., :, None] + g[..., None, :]
            if float(np.min(gap)) < 1e-12:
                raise SylvesterError(f"gamma principal block is singular at 2l={t}")
            sub_blocks[t] = vectors @ ((vh @ s2.full(t) @ vectors) / gap) @ vh
        gamma05 = Symbol(grid, sub_blocks, order=0.5)

        q_values = surface.rho ** (-1.0 / 3.0) * np.sqrt(surface.beta1)
        q = Symbol.scalar_field(grid, q_values, lambda label: np.eye(label.dim), labels)
        lam_inv = lam.map(lambda _, b: np.linalg.inv(b), order=-1.0)
        p05 = gamma15.scale(q_values) @ lam_inv
        p05.order = 0.5
        correction = (
            gamma05.scale(q_values)
            + (compose(gamma15, q, 1, ops) - gamma15 @ q)
            - (compose(p05, lam, 1, ops) - p05 @ lam)
        )
        p_sub = correction @ lam_inv
        p_sub.order = -0.5

        keep = [2 * n for n in range(self.l_max + 1)]
        return SymmetrizerSet(
            gamma15.restrict(keep),
            gamma05.restrict(keep),
            p05.restrict(keep),
            p_sub.restrict(keep),
            q.restrict(keep),
            q_values,
        )

    def symmetrized_energy(self, state: WaveState, sym: SymmetrizerSet | None = None) -> float:
        """‖T_pζ_{≥2}‖² + ‖Π₀,₁ζ‖² + ‖T_q u‖² for the good unknown u; monitored only."""
        sym = sym or self.symmetrizer(state)
        top = 2 * self.l_max
        zeta = state.zeta.resize(self.l_max)
        high = zeta.without_degrees((0, 1))
        low = zeta.only_degrees((0, 1))
        tp = project(para_op(sym.p, self.chi, lift(high), top), self.l_max)
        phi = state.phi.resize(self.l_max)
        dn_value = self.oracle(WaveState(zeta, phi, state.t))
        good = good_unknown(zeta, phi, dn_value, grid=self.grid, gap_log2=self.gap_log2)
        tq = project(para_op(sym.q, self.chi, lift(good.u), top), self.l_max)
        return tp.norm() ** 2 + low.norm() ** 2 + tq.norm() ** 2


def flat_symmetrizer_values(label: RepLabel) -> dict[str, float]:
    """Closed forms at ζ = 0: γ₁.₅, γ₀.₅, p₀.₅ and q on block l."""
    casimir = label.casimir
    if casimir == 0.0:
        return {"gamma_principal": 0.0, "gamma_sub": 0.0, "p_principal": 0.0, "q": 1.0}
    root = math.sqrt(casimir)
    return {
        "gamma_principal": casimir**0.75,
        "gamma_sub": (-casimir / 2.0 - 2.0 * root + 1.0) / (2.0 * casimir**0.75),
        "p_principal": casimir**0.75 / (root - 0.5),
        "q": 1.0,
    }
