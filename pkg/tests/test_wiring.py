from __future__ import annotations

import pytest

from paragroup.app.wiring import (
    create_cutoff,
    create_wave_system,
    initial_state,
    load_surface_data,
)
from paragroup.config.settings import AppSettings, InitialMode
from paragroup.core.harmonic.io import save_sphfn
from paragroup.core.harmonic.spherical import SphFn
from paragroup.domain.models import CutoffRule, DnMode


def test_cutoff_follows_settings():
    settings = AppSettings()
    settings.calculus.delta = 0.2
    settings.calculus.cutoff_rule = CutoffRule.INTEGRAL
    chi = create_cutoff(settings)
    assert chi.delta == 0.2
    assert chi.rule is CutoffRule.INTEGRAL
    assert chi.family.nodes_per_octave == settings.calculus.lp_nodes_per_octave


def test_wave_system_follows_settings():
    settings = AppSettings()
    settings.waves.dn_mode = DnMode.PARA
    system = create_wave_system(settings, l_max=4)
    assert system.l_max == 4
    assert system.dn_mode is DnMode.PARA
    assert system.n_max == settings.dn.n_max
    assert system.scheme is settings.waves.scheme


def test_initial_mode_above_l_max_is_rejected():
    settings = AppSettings()
    settings.grid.l_max = 3
    settings.waves.initial = [InitialMode(n=5, m=0, zeta=0.01)]
    with pytest.raises(ValueError):
        initial_state(settings)


def test_initial_state_without_frame_shift():
    settings = AppSettings()
    settings.grid.l_max = 4
    settings.waves.center_of_mass = False
    state = initial_state(settings)
    assert state.zeta.get(2, 0) == pytest.approx(0.01)
    assert state.phi.norm() == 0.0
    assert state.t == 0.0


def test_surface_data_absent():
    assert load_surface_data(AppSettings()) is None


def test_surface_data_needs_both_files():
    settings = AppSettings()
    settings.dn.zeta_file = "zeta.json"
    with pytest.raises(ValueError):
        load_surface_data(settings)


def test_surface_data_relative_to_config(tmp_path):
    zeta = SphFn.real_mode(3, 2, 0, 0.01)
    phi = SphFn.real_mode(3, 3, 1)
    save_sphfn(tmp_path / "zeta.json", zeta)
    save_sphfn(tmp_path / "phi.json", phi)
    settings = AppSettings()
    settings.dn.zeta_file = "zeta.json"
    settings.dn.phi_file = "phi.json"
    loaded = load_surface_data(settings, config_path=tmp_path / "settings.json")
    assert loaded is not None
    assert loaded[0].get(2, 0) == pytest.approx(zeta.get(2, 0))
    assert loaded[1].get(3, 1) == pytest.approx(phi.get(3, 1))
