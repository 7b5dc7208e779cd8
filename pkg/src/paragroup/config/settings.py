from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any

from paragroup.core.harmonic.grids import EulerGrid
from paragroup.domain.models import CutoffRule, DnMode, Scheme


@dataclass(slots=True)
class GridSettings:
    l_max: int = 12
    n_phi: int = 32
    n_theta: int = 16
    n_psi: int = 32
    transform_band: int = 15

    def validate(self) -> None:
        if self.l_max < 2:
            raise ValueError("l_max must be >= 2")
        if min(self.n_phi, self.n_theta, self.n_psi) <= 0:
            raise ValueError("n_phi, n_theta and n_psi must be > 0")
        if self.transform_band < 0:
            raise ValueError("transform_band must be >= 0")
        if self.transform_band > self.euler_grid().exactness:
            raise ValueError(
                f"transform_band must be <= {self.euler_grid().exactness} for the configured grid"
            )

    def euler_grid(self) -> EulerGrid:
        return EulerGrid(self.n_phi, self.n_theta, self.n_psi)


@dataclass(slots=True)
class CalculusSettings:
    delta: float = 0.25
    cutoff_rule: CutoffRule = CutoffRule.SHARP
    lp_nodes_per_octave: int = 32
    paraproduct_gap_log2: float = 10.0
    taylor_order: int = 2
    decay_l_max: int = 16

    def validate(self) -> None:
        if not (0.0 < self.delta < 0.5):
            raise ValueError("delta must be in (0, 0.5)")
        if not isinstance(self.cutoff_rule, CutoffRule):
            raise ValueError("invalid cutoff_rule")
        if self.lp_nodes_per_octave < 4:
            raise ValueError("lp_nodes_per_octave must be >= 4")
        if self.paraproduct_gap_log2 <= 0:
            raise ValueError("paraproduct_gap_log2 must be > 0")
        if self.taylor_order not in (1, 2):
            raise ValueError("taylor_order must be 1 or 2")
        if not 4 <= self.decay_l_max <= 24:
            raise ValueError("decay_l_max must be in [4, 24]")


@dataclass(slots=True)
class DnSettings:
    n_max: int = 16
    cond_threshold: float = 1e12
    residual_tolerance: float = 1e-6
    y_nodes: int = 16
    smallness: float = 0.1
    zeta_file: str = ""
    phi_file: str = ""
    amplitudes: list[float] = field(default_factory=lambda: [0.01, 0.02, 0.04])

    def validate(self) -> None:
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2")
        if self.cond_threshold <= 1.0:
            raise ValueError("cond_threshold must be > 1")
        if self.residual_tolerance <= 0:
            raise ValueError("residual_tolerance must be > 0")
        if self.y_nodes < 3:
            raise ValueError("y_nodes must be >= 3")
        if self.smallness <= 0:
            raise ValueError("smallness must be > 0")
        if not self.amplitudes or any(a <= 0 for a in self.amplitudes):
            raise ValueError("amplitudes must be a non-empty list of positive numbers")


@dataclass(slots=True)
class InitialMode:
    n: int
    m: int
    zeta: float = 0.0
    phi: float = 0.0

    def validate(self) -> None:
        if self.n < 0 or abs(self.m) > self.n:
            raise ValueError(f"initial mode (n={self.n}, m={self.m}) is not a valid degree/order")


def _default_initial() -> list[InitialMode]:
    return [InitialMode(n=2, m=0, zeta=0.01, phi=0.0)]


@dataclass(slots=True)
class WavesSettings:
    dt: float = 1e-3
    t_final: float = 0.5
    dn_mode: DnMode = DnMode.ORACLE
    scheme: Scheme = Scheme.RK4
    output_every: int = 50
    cfl: float = 2.0
    pressure: float = -2.0
    monitor_energy: bool = False
    center_of_mass: bool = True
    initial: list[InitialMode] = field(default_factory=_default_initial)

    def validate(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_final < 0:
            raise ValueError("t_final must be >= 0")
        if not isinstance(self.dn_mode, DnMode):
            raise ValueError("invalid dn_mode")
        if not isinstance(self.scheme, Scheme):
            raise ValueError("invalid scheme")
        if self.output_every <= 0:
            raise ValueError("output_every must be > 0")
        if self.cfl <= 0:
            raise ValueError("cfl must be > 0")
        for mode in self.initial:
            mode.validate()


@dataclass(slots=True)
class SpectrumSettings:
    modes: list[int] = field(default_factory=lambda: [2, 3, 4])
    amplitude: float = 1e-3
    periods: float = 3.0
    l_max: int = 6
    dt: float = 5e-3

    def validate(self) -> None:
        if not self.modes or any(n < 2 for n in self.modes):
            raise ValueError("modes must be a non-empty list of degrees >= 2")
        if max(self.modes) > self.l_max:
            raise ValueError("modes must not exceed spectrum l_max")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be > 0")
        if self.periods < 1.5:
            raise ValueError("periods must be >= 1.5")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")


@dataclass(slots=True)
class RunSettings:
    seed: int = 0
    deterministic: bool = False
    output_dir: str = "paragroup-out"

    def validate(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if not self.output_dir:
            raise ValueError("output_dir must be non-empty")


@dataclass(slots=True)
class AppSettings:
    grid: GridSettings = field(default_factory=GridSettings)
    calculus: CalculusSettings = field(default_factory=CalculusSettings)
    dn: DnSettings = field(default_factory=DnSettings)
    waves: WavesSettings = field(default_factory=WavesSettings)
    spectrum: SpectrumSettings = field(default_factory=SpectrumSettings)
    run: RunSettings = field(default_factory=RunSettings)

    def validate(self) -> None:
        self.grid.validate()
        self.calculus.validate()
        self.dn.validate()
        self.waves.validate()
        self.spectrum.validate()
        self.run.validate()


def _enum_to_value(obj: object) -> object:
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: _enum_to_value(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_enum_to_value(v) for v in obj]
    return obj


def to_dict(settings: AppSettings) -> dict[str, Any]:
    data: dict[str, Any] = {
        "grid": {
            "l_max": settings.grid.l_max,
            "n_phi": settings.grid.n_phi,
            "n_theta": settings.grid.n_theta,
            "n_psi": settings.grid.n_psi,
            "transform_band": settings.grid.transform_band,
        },
        "calculus": {
            "delta": settings.calculus.delta,
            "cutoff_rule": settings.calculus.cutoff_rule,
            "lp_nodes_per_octave": settings.calculus.lp_nodes_per_octave,
            "paraproduct_gap_log2": settings.calculus.paraproduct_gap_log2,
            "taylor_order": settings.calculus.taylor_order,
            "decay_l_max": settings.calculus.decay_l_max,
        },
        "dn": {
            "n_max": settings.dn.n_max,
            "cond_threshold": settings.dn.cond_threshold,
            "residual_tolerance": settings.dn.residual_tolerance,
            "y_nodes": settings.dn.y_nodes,
            "smallness": settings.dn.smallness,
            "zeta_file": settings.dn.zeta_file,
            "phi_file": settings.dn.phi_file,
            "amplitudes": list(settings.dn.amplitudes),
        },
        "waves": {
            "dt": settings.waves.dt,
            "t_final": settings.waves.t_final,
            "dn_mode": settings.waves.dn_mode,
            "scheme": settings.waves.scheme,
            "output_every": settings.waves.output_every,
            "cfl": settings.waves.cfl,
            "pressure": settings.waves.pressure,
            "monitor_energy": settings.waves.monitor_energy,
            "center_of_mass": settings.waves.center_of_mass,
            "initial": [
                {"n": mode.n, "m": mode.m, "zeta": mode.zeta, "phi": mode.phi}
                for mode in settings.waves.initial
            ],
        },
        "spectrum": {
            "modes": list(settings.spectrum.modes),
            "amplitude": settings.spectrum.amplitude,
            "periods": settings.spectrum.periods,
            "l_max": settings.spectrum.l_max,
            "dt": settings.spectrum.dt,
        },
        "run": {
            "seed": settings.run.seed,
            "deterministic": settings.run.deterministic,
            "output_dir": settings.run.output_dir,
        },
    }
    return _enum_to_value(data)  # type: ignore[return-value]


def _initial_from(raw: Any) -> list[InitialMode]:
    if raw is None:
        return _default_initial()
    if not isinstance(raw, list):
        raise ValueError("waves.initial must be a list of {n, m, zeta, phi} records")
    return [
        InitialMode(
            n=int(item["n"]),
            m=int(item.get("m", 0)),
            zeta=float(item.get("zeta", 0.0)),
            phi=float(item.get("phi", 0.0)),
        )
        for item in raw
    ]


def from_dict(data: dict[str, Any]) -> AppSettings:
    grid = data.get("grid") or {}
    calculus = data.get("calculus") or {}
    dn = data.get("dn") or {}
    waves = data.get("waves") or {}
    spectrum = data.get("spectrum") or {}
    run = data.get("run") or {}

    settings = AppSettings(
        grid=GridSettings(
            l_max=int(grid.get("l_max", 12)),
            n_phi=int(grid.get("n_phi", 32)),
            n_theta=int(grid.get("n_theta", 16)),
            n_psi=int(grid.get("n_psi", 32)),
            transform_band=int(grid.get("transform_band", 15)),
        ),
        calculus=CalculusSettings(
            delta=float(calculus.get("delta", 0.25)),
            cutoff_rule=CutoffRule(calculus.get("cutoff_rule", CutoffRule.SHARP.value)),
            lp_nodes_per_octave=int(calculus.get("lp_nodes_per_octave", 32)),
            paraproduct_gap_log2=float(calculus.get("paraproduct_gap_log2", 10.0)),
            taylor_order=int(calculus.get("taylor_order", 2)),
            decay_l_max=int(calculus.get("decay_l_max", 16)),
        ),
        dn=DnSettings(
            n_max=int(dn.get("n_max", 16)),
            cond_threshold=float(dn.get("cond_threshold", 1e12)),
            residual_tolerance=float(dn.get("residual_tolerance", 1e-6)),
            y_nodes=int(dn.get("y_nodes", 16)),
            smallness=float(dn.get("smallness", 0.1)),
            zeta_file=str(dn.get("zeta_file", "")),
            phi_file=str(dn.get("phi_file", "")),
            amplitudes=[float(a) for a in dn.get("amplitudes", [0.01, 0.02, 0.04])],
        ),
        waves=WavesSettings(
            dt=float(waves.get("dt", 1e-3)),
            t_final=float(waves.get("t_final", 0.5)),
            dn_mode=DnMode(waves.get("dn_mode", DnMode.ORACLE.value)),
            scheme=Scheme(waves.get("scheme", Scheme.RK4.value)),
            output_every=int(waves.get("output_every", 50)),
            cfl=float(waves.get("cfl", 2.0)),
            pressure=float(waves.get("pressure", -2.0)),
            monitor_energy=bool(waves.get("monitor_energy", False)),
            center_of_mass=bool(waves.get("center_of_mass", True)),
            initial=_initial_from(waves.get("initial")),
        ),
        spectrum=SpectrumSettings(
            modes=[int(n) for n in spectrum.get("modes", [2, 3, 4])],
            amplitude=float(spectrum.get("amplitude", 1e-3)),
            periods=float(spectrum.get("periods", 3.0)),
            l_max=int(spectrum.get("l_max", 6)),
            dt=float(spectrum.get("dt", 5e-3)),
        ),
        run=RunSettings(
            seed=int(run.get("seed", 0)),
            deterministic=bool(run.get("deterministic", False)),
            output_dir=str(run.get("output_dir", "paragroup-out")),
        ),
    )
    settings.validate()
    return settings


def _type_name(value: Any) -> str:
    if isinstance(value, Enum):
        return "string"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "number"
    if isinstance(value, list):
        return "array"
    return "string"


def schema() -> dict[str, Any]:
    """JSON schema of the settings file, with every default."""
    defaults = AppSettings()
    default_data = to_dict(defaults)
    sections: dict[str, Any] = {}
    for section_field in fields(AppSettings):
        section = getattr(defaults, section_field.name)
        props: dict[str, Any] = {}
        for item in fields(section):
            value = getattr(section, item.name)
            entry: dict[str, Any] = {
                "type": _type_name(value),
                "default": default_data[section_field.name][item.name],
            }
            if isinstance(value, Enum):
                entry["enum"] = [member.value for member in type(value)]
            props[item.name] = entry
        sections[section_field.name] = {
            "type": "object",
            "properties": props,
            "additionalProperties": False,
        }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "paragroup settings",
        "type": "object",
        "properties": sections,
        "additionalProperties": False,
    }


def load_settings(path: Path) -> AppSettings:
    raw = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError("settings file must contain a JSON object")
    return from_dict(raw)


def save_settings(path: Path, settings: AppSettings) -> None:
    settings.validate()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_dict(settings), ensure_ascii=False, indent=2), encoding="utf-8")
