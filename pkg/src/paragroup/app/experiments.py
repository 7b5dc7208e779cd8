"""Runners behind the `transform`, `dn-compare`, `simulate` and `spectrum` subcommands."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from paragroup.app.outputs import write_report, write_rows
from paragroup.app.wiring import (
    create_cutoff,
    create_rng,
    create_wave_system,
    initial_state,
    load_surface_data,
)
from paragroup.config.settings import AppSettings
from paragroup.core.harmonic.grids import GridFn, SphereGrid
from paragroup.core.harmonic.io import save_json, save_spectral, sphfn_to_dict, write_grid_csv
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.harmonic.spherical import SphFn
from paragroup.core.harmonic.transform import plancherel_defect
from paragroup.core.water.dno import (
    ParalinearResult,
    factorization_residual,
    flat_dn_multiplier,
    oracle_dn,
    paralinearized_dn,
    remainder_report,
)
from paragroup.core.water.spectrum import fit_mode
from paragroup.core.water.waves import WaveState
from paragroup.domain.models import RepLabel

logger = logging.getLogger(__name__)

REPORT_FILENAME = "report.json"


@dataclass(slots=True)
class TransformRunner:
    settings: AppSettings
    output_dir: Path

    def run(self) -> int:
        rng = create_rng(self.settings)
        grid = self.settings.grid.euler_grid()
        band = self.settings.grid.transform_band
        a = SpectralFn.random(band, rng)
        f = GridFn(grid, grid.inverse(a))
        back = grid.forward(f.values, band)
        roundtrip = max(float(np.max(np.abs(a.block(t) - back.block(t)))) for t in range(band + 1))
        plancherel = plancherel_defect(f, back)

        l_max = self.settings.grid.l_max
        sphere = SphereGrid.for_band(2 * l_max)
        g = SphFn.random(l_max, rng)
        g_back = SphFn.from_values(g.values(sphere), sphere, l_max)
        sphere_roundtrip = float(np.max(np.abs(g_back.coeffs - g.coeffs)))

        save_spectral(self.output_dir / "spectral.json", back)
        write_grid_csv(self.output_dir / "grid.csv", f)
        out_norms = back.hs_norms()
        write_rows(
            self.output_dir / "blocks.csv",
            ["twice_l", "hs_norm_in", "hs_norm_out"],
            ([t, norm, out_norms.get(t, 0.0)] for t, norm in a.hs_norms().items()),
        )
        write_report(
            self.output_dir / REPORT_FILENAME,
            {
                "grid": grid.ident,
                "twice_l_max": band,
                "plancherel_defect": plancherel,
                "roundtrip_defect": roundtrip / max(a.max_abs(), 1e-300),
                "sphere_grid": sphere.ident,
                "sphere_roundtrip_defect": sphere_roundtrip,
            },
        )
        logger.info(
            f"[Transform] {grid.ident} band 2l<={band}: plancherel {plancherel:.2e}, "
            f"round trip {roundtrip:.2e}"
        )
        return 0


@dataclass(slots=True)
class DnCompareRunner:
    """Oracle vs paralinearized DN: per-mode table, remainder norms over amplitudes, λ symbol."""

    settings: AppSettings
    output_dir: Path
    config_path: Path | None = None
    derivative_step: float = 1e-3

    def _oracle(self, zeta: SphFn, phi: SphFn) -> SphFn:
        dn = self.settings.dn
        return oracle_dn(
            zeta,
            phi,
            n_max=dn.n_max,
            cond_threshold=dn.cond_threshold,
            residual_tolerance=dn.residual_tolerance,
            l_max=phi.l_max,
        ).value

    def _para(self, zeta: SphFn, phi: SphFn, oracle: SphFn) -> ParalinearResult:
        return paralinearized_dn(
            zeta,
            phi,
            dn_value=oracle,
            chi=create_cutoff(self.settings),
            gap_log2=self.settings.calculus.paraproduct_gap_log2,
            smallness=self.settings.dn.smallness,
        )

    def _remainder(self, zeta: SphFn, phi: SphFn) -> tuple[SphFn, SphFn, ParalinearResult]:
        oracle = self._oracle(zeta, phi)
        para = self._para(zeta, phi, oracle)
        return oracle, oracle - para.value, para

    def _cases(self, l_max: int) -> list[tuple[float, SphFn, SphFn]]:
        loaded = load_surface_data(self.settings, config_path=self.config_path)
        if loaded is not None:
            zeta, phi = loaded
            return [(1.0, zeta.resize(l_max), phi.resize(l_max))]
        shape = SphFn.real_mode(l_max, 2, 0)
        phi = SphFn.real_mode(l_max, 3, 0)
        return [(eps, shape * eps, phi) for eps in self.settings.dn.amplitudes]

    def run(self) -> int:
        l_max = self.settings.grid.l_max
        cases = self._cases(l_max)
        first_zeta = cases[0][1]

        mode_rows = []
        for n in range(l_max + 1):
            mode = SphFn.real_mode(l_max, n, 0)
            flat = self._oracle(SphFn.zeros(l_max), mode).get(n, 0).real
            oracle = self._oracle(first_zeta, mode)
            para = self._para(first_zeta, mode, oracle).value
            symbol = flat_dn_multiplier(RepLabel(2 * n))
            mode_rows.append(
                [n, flat, symbol, abs(symbol - n), oracle.get(n, 0).real, para.get(n, 0).real]
            )
        write_rows(
            self.output_dir / "modes.csv",
            ["n", "flat_oracle", "flat_symbol", "symbol_gap", "oracle", "para"],
            mode_rows,
        )

        remainder_rows = []
        second_norms = []
        first_para: ParalinearResult | None = None
        linear: tuple[SphFn, SphFn] | None = None
        if len(cases) > 1:
            shape = cases[0][1] * (1.0 / cases[0][0])
            phi = cases[0][2]
            _, base, _ = self._remainder(SphFn.zeros(l_max), phi)
            h = self.derivative_step
            _, plus, _ = self._remainder(shape * h, phi)
            _, minus, _ = self._remainder(shape * (-h), phi)
            linear = (base, (plus - minus) * (1.0 / (2.0 * h)))
        for eps, zeta, phi in cases:
            oracle, remainder, para = self._remainder(zeta, phi)
            if first_para is None:
                first_para = para
            report = remainder_report(oracle, para.value)
            second = float("nan")
            if linear is not None:
                base, slope = linear
                second = (remainder - base - slope * eps).norm(0.5)
                second_norms.append(second)
            remainder_rows.append(
                [
                    eps,
                    report["remainder_hs"],
                    report["remainder_hs_half"],
                    report["oracle_hs"],
                    report["relative"],
                    second,
                ]
            )
            logger.info(
                f"[DN] eps={eps:g}: remainder H^1/2 {report['remainder_hs_half']:.3e} "
                f"(relative {report['relative']:.3e})"
            )
        write_rows(
            self.output_dir / "remainder.csv",
            [
                "amplitude",
                "remainder_hs",
                "remainder_hs_half",
                "oracle_hs",
                "relative",
                "second_order_hs_half",
            ],
            remainder_rows,
        )

        if first_para is not None:
            lam = first_para.symbols.symbol("lambda")
            rows = []
            for t in lam.labels:
                label = RepLabel(t)
                traces = np.trace(lam.full(t), axis1=-2, axis2=-1).real / label.dim
                rows.append(
                    [
                        t // 2,
                        flat_dn_multiplier(label),
                        float(np.mean(traces)),
                        float(np.min(traces)),
                        float(np.max(traces)),
                    ]
                )
            write_rows(
                self.output_dir / "symbol.csv",
                ["n", "flat_symbol", "mean_trace", "min_trace", "max_trace"],
                rows,
            )

        factor = factorization_residual(
            first_zeta,
            cases[0][2],
            y_nodes=self.settings.dn.y_nodes,
            chi=create_cutoff(self.settings),
        )
        write_rows(
            self.output_dir / "factorization.csv",
            ["y", "residual_hs", "profile_hs", "relative"],
            (
                [float(y), r.norm(), w.norm(), r.norm() / max(w.norm(), 1e-300)]
                for y, r, w in zip(factor.nodes, factor.residual, factor.profile)
            ),
        )
        logger.info(
            f"[DN] factorization residual relative {factor.relative():.3e} over "
            f"{self.settings.dn.y_nodes} depth nodes"
        )

        slope = None
        if len(second_norms) > 1 and all(v > 0 for v in second_norms):
            amplitudes = [row[0] for row in remainder_rows]
            slope = float(np.polyfit(np.log(amplitudes), np.log(second_norms), 1)[0])
            logger.info(f"[DN] second-order remainder slope {slope:.2f}")
        write_report(
            self.output_dir / REPORT_FILENAME,
            {
                "l_max": l_max,
                "amplitudes": [row[0] for row in remainder_rows],
                "remainder_slope": slope,
                "relative_at_smallest": min(remainder_rows)[4] if remainder_rows else None,
                "factorization_relative": factor.relative(),
                "depth_derivative_error": factor.depth_error,
            },
        )
        return 0


def _snapshot(path: Path, state: WaveState) -> None:
    payload = {"t": state.t, "zeta": sphfn_to_dict(state.zeta), "phi": sphfn_to_dict(state.phi)}
    save_json(path, payload)


@dataclass(slots=True)
class SimulateRunner:
    settings: AppSettings
    output_dir: Path

    def run(self) -> int:
        waves = self.settings.waves
        system = create_wave_system(self.settings)
        state = initial_state(self.settings)
        steps = int(round(waves.t_final / waves.dt))
        degrees = list(range(system.l_max + 1))
        header = [
            "t",
            "volume",
            "area",
            "kinetic",
            "hamiltonian",
            "momentum_x",
            "momentum_y",
            "momentum_z",
            "center_x",
            "center_y",
            "center_z",
        ]
        header += [f"zeta_n{n}" for n in degrees]
        if waves.monitor_energy:
            header.append("symmetrized_energy")

        rows = []
        for k, current in enumerate(system.run(state, waves.dt, steps, every=waves.output_every)):
            q = system.conserved(current)
            row = [current.t, q.volume, q.area, q.kinetic, q.hamiltonian, *q.momentum, *q.center]
            row += [current.zeta.only_degrees([n]).norm() for n in degrees]
            if waves.monitor_energy:
                row.append(system.symmetrized_energy(current))
            rows.append(row)
            _snapshot(self.output_dir / f"snapshot_{k:04d}.json", current)
            logger.info(
                f"[Waves] t={current.t:.4f} volume={q.volume:.10f} hamiltonian={q.hamiltonian:.10f}"
            )
        write_rows(self.output_dir / "series.csv", header, rows)

        volumes = np.array([r[1] for r in rows])
        energies = np.array([r[4] for r in rows])
        momenta = np.array([r[5:8] for r in rows])
        write_report(
            self.output_dir / REPORT_FILENAME,
            {
                "l_max": system.l_max,
                "dt": waves.dt,
                "steps": steps,
                "dn_mode": system.dn_mode.value,
                "volume_drift": float(np.max(np.abs(volumes - volumes[0])) / abs(volumes[0])),
                "hamiltonian_drift": float(
                    np.max(np.abs(energies - energies[0])) / max(abs(energies[0]), 1e-300)
                ),
                "max_momentum": float(np.max(np.abs(momenta))) if momenta.size else 0.0,
            },
        )
        return 0


@dataclass(slots=True)
class SpectrumRunner:
    settings: AppSettings
    output_dir: Path

    def run(self) -> int:
        cfg = self.settings.spectrum
        system = create_wave_system(self.settings, l_max=cfg.l_max)
        rows = []
        worst = 0.0
        for n in cfg.modes:
            fit = fit_mode(system, n, amplitude=cfg.amplitude, periods=cfg.periods, dt=cfg.dt)
            rows.append([n, fit.expected, fit.fitted, fit.relative_error, fit.samples])
            worst = max(worst, fit.relative_error)
        write_rows(
            self.output_dir / "spectrum.csv",
            ["n", "expected", "fitted", "relative_error", "samples"],
            rows,
        )
        write_report(
            self.output_dir / REPORT_FILENAME,
            {"l_max": cfg.l_max, "dt": cfg.dt, "max_relative_error": worst},
        )
        return 0
