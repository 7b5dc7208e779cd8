from __future__ import annotations

import json

import pytest

from paragroup.config import paths
from paragroup.config.settings import (
    AppSettings,
    CalculusSettings,
    GridSettings,
    InitialMode,
    SpectrumSettings,
    WavesSettings,
    from_dict,
    load_settings,
    save_settings,
    schema,
    to_dict,
)
from paragroup.domain.models import CutoffRule, DnMode


def test_settings_roundtrip(tmp_path):
    path = tmp_path / "settings.json"
    settings = AppSettings()
    settings.waves.dn_mode = DnMode.PARA
    settings.calculus.cutoff_rule = CutoffRule.INTEGRAL
    save_settings(path, settings)

    loaded = load_settings(path)
    assert loaded == settings


def test_enums_are_stored_as_strings():
    data = to_dict(AppSettings())
    assert data["waves"]["dn_mode"] == "oracle"
    assert data["calculus"]["cutoff_rule"] == "sharp"
    json.dumps(data)


def test_settings_validation_rejects_invalid_delta():
    settings = AppSettings(calculus=CalculusSettings(delta=0.7))
    with pytest.raises(ValueError):
        settings.validate()


def test_settings_validation_rejects_band_beyond_grid():
    settings = AppSettings(grid=GridSettings(n_phi=8, n_theta=4, n_psi=17, transform_band=9))
    with pytest.raises(ValueError):
        settings.validate()


def test_settings_validation_rejects_spectrum_mode_above_l_max():
    settings = AppSettings(spectrum=SpectrumSettings(modes=[2, 8], l_max=6))
    with pytest.raises(ValueError):
        settings.validate()


def test_settings_validation_rejects_bad_initial_mode():
    settings = AppSettings(waves=WavesSettings(initial=[InitialMode(n=2, m=3, zeta=0.01)]))
    with pytest.raises(ValueError):
        settings.validate()


def test_unknown_enum_value_is_rejected():
    with pytest.raises(ValueError):
        from_dict({"waves": {"dn_mode": "magic"}})


def test_partial_file_uses_defaults():
    settings = from_dict({"grid": {"l_max": 8}})
    assert settings.grid.l_max == 8
    assert settings.spectrum.modes == [2, 3, 4]
    assert settings.waves.initial == [InitialMode(n=2, m=0, zeta=0.01, phi=0.0)]


def test_load_rejects_non_object(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError):
        load_settings(path)


def test_schema_lists_defaults_and_enums():
    out = schema()
    waves = out["properties"]["waves"]["properties"]
    assert waves["dn_mode"]["enum"] == [m.value for m in DnMode]
    assert waves["dt"] == {"type": "number", "default": 1e-3}
    assert out["properties"]["run"]["properties"]["deterministic"]["type"] == "boolean"


def test_output_dir_is_created(tmp_path):
    out = paths.output_dir(tmp_path / "runs", "simulate")
    assert out.is_dir()
    assert out.name == "simulate"


def test_user_config_dir_follows_xdg(monkeypatch, tmp_path):
    monkeypatch.setattr(paths.sys, "platform", "linux")
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path))
    assert paths.default_settings_path() == tmp_path / "paragroup" / "settings.json"


def test_settings_validation_rejects_decay_band_out_of_range():
    assert AppSettings().calculus.decay_l_max == 16
    settings = AppSettings(calculus=CalculusSettings(decay_l_max=2))
    with pytest.raises(ValueError):
        settings.validate()
