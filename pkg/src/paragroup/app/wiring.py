from __future__ import annotations

from pathlib import Path

import numpy as np

from paragroup.config.settings import AppSettings
from paragroup.core.calculus.littlewood_paley import CutoffFamily
from paragroup.core.calculus.paradiff import AdmissibleCutoff
from paragroup.core.harmonic.io import load_sphfn
from paragroup.core.harmonic.spherical import SphFn
from paragroup.core.water.waves import WaveState, WaveSystem, center_of_mass_frame


def create_family(settings: AppSettings) -> CutoffFamily:
    return CutoffFamily(nodes_per_octave=settings.calculus.lp_nodes_per_octave)


def create_cutoff(settings: AppSettings) -> AdmissibleCutoff:
    return AdmissibleCutoff(
        delta=settings.calculus.delta,
        rule=settings.calculus.cutoff_rule,
        family=create_family(settings),
    )


def create_rng(settings: AppSettings) -> np.random.Generator:
    return np.random.default_rng(settings.run.seed)


def create_wave_system(settings: AppSettings, *, l_max: int | None = None) -> WaveSystem:
    return WaveSystem(
        l_max=settings.grid.l_max if l_max is None else l_max,
        dn_mode=settings.waves.dn_mode,
        pressure=settings.waves.pressure,
        cfl=settings.waves.cfl,
        n_max=settings.dn.n_max,
        cond_threshold=settings.dn.cond_threshold,
        residual_tolerance=settings.dn.residual_tolerance,
        chi=create_cutoff(settings),
        gap_log2=settings.calculus.paraproduct_gap_log2,
        smallness=settings.dn.smallness,
        scheme=settings.waves.scheme,
    )


def initial_state(settings: AppSettings) -> WaveState:
    """Initial (ζ, φ) from the configured real coefficient records."""
    l_max = settings.grid.l_max
    for mode in settings.waves.initial:
        if mode.n > l_max:
            raise ValueError(f"initial mode n={mode.n} exceeds grid.l_max={l_max}")
    zeta = SphFn.from_records(l_max, [(m.n, m.m, m.zeta) for m in settings.waves.initial])
    phi = SphFn.from_records(l_max, [(m.n, m.m, m.phi) for m in settings.waves.initial])
    if settings.waves.center_of_mass:
        zeta, phi = center_of_mass_frame(zeta, phi)
    return WaveState(zeta, phi)


def _resolve(path: str, config_path: Path | None) -> Path:
    candidate = Path(path)
    if not candidate.is_absolute() and config_path is not None:
        candidate = config_path.parent / candidate
    return candidate


def load_surface_data(
    settings: AppSettings, *, config_path: Path | None = None
) -> tuple[SphFn, SphFn] | None:
    """(ζ, φ) from `dn.zeta_file` / `dn.phi_file`, or None when neither is set.

    Relative paths are taken against the settings file's directory.
    """
    if not settings.dn.zeta_file and not settings.dn.phi_file:
        return None
    if not settings.dn.zeta_file or not settings.dn.phi_file:
        raise ValueError("dn.zeta_file and dn.phi_file must be given together")
    zeta = load_sphfn(_resolve(settings.dn.zeta_file, config_path))
    phi = load_sphfn(_resolve(settings.dn.phi_file, config_path))
    return zeta.real_part(), phi.real_part()
