from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from paragroup.core.harmonic.grids import EulerGrid, GridFn, SphereGrid
from paragroup.core.harmonic.spectral import SpectralFn
from paragroup.core.harmonic.spherical import SphFn
from paragroup.domain.errors import IndexRangeError


def interleave(values: np.ndarray) -> list[float]:
    flat = np.asarray(values, dtype=complex).reshape(-1)
    out = np.empty(2 * flat.size)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return out.tolist()


def deinterleave(raw: list[float], shape: tuple[int, ...]) -> np.ndarray:
    data = np.asarray(raw, dtype=float)
    if data.size != 2 * int(np.prod(shape)):
        raise IndexRangeError(f"expected {2 * int(np.prod(shape))} numbers, got {data.size}")
    return (data[0::2] + 1j * data[1::2]).reshape(shape)


def spectral_to_dict(a: SpectralFn) -> dict[str, Any]:
    """Blocks as interleaved re/im arrays, row-major (first index ascending, then second)."""
    return {
        "twice_l_max": a.twice_l_max,
        "blocks": {str(t): interleave(b) for t, b in sorted(a.blocks.items())},
    }


def spectral_from_dict(data: dict[str, Any]) -> SpectralFn:
    top = int(data["twice_l_max"])
    blocks = {}
    for key, raw in (data.get("blocks") or {}).items():
        t = int(key)
        blocks[t] = deinterleave(raw, (t + 1, t + 1))
    return SpectralFn(top, blocks)


def sphfn_to_dict(g: SphFn) -> dict[str, Any]:
    records = []
    for n in range(g.l_max + 1):
        for m in range(-n, n + 1):
            value = g.get(n, m)
            if value != 0:
                records.append([n, m, value.real, value.imag])
    return {"l_max": g.l_max, "coeffs": records}


def sphfn_from_dict(data: dict[str, Any]) -> SphFn:
    out = SphFn.zeros(int(data["l_max"]))
    for n, m, re, im in data.get("coeffs") or []:
        out.set(int(n), int(m), complex(re, im))
    return out


def save_json(path: Path, payload: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False), encoding="utf-8")


def load_json(path: Path) -> dict[str, Any]:
    return json.loads(path.read_text(encoding="utf-8"))


def save_spectral(path: Path, a: SpectralFn) -> None:
    save_json(path, spectral_to_dict(a))


def load_spectral(path: Path) -> SpectralFn:
    return spectral_from_dict(load_json(path))


def save_sphfn(path: Path, g: SphFn) -> None:
    save_json(path, sphfn_to_dict(g))


def load_sphfn(path: Path) -> SphFn:
    return sphfn_from_dict(load_json(path))


def write_grid_csv(path: Path, f: GridFn) -> None:
    """One row per node: theta, phi, psi, re, im (phi is empty on sphere grids)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = f.grid
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["theta", "phi", "psi", "re", "im"])
        if isinstance(grid, EulerGrid):
            phi, theta, psi = grid.points()
            for idx in np.ndindex(grid.shape):
                value = complex(f.values[idx])
                writer.writerow([theta[idx], phi[idx], psi[idx], value.real, value.imag])
        elif isinstance(grid, SphereGrid):
            theta, psi = grid.points()
            for idx in np.ndindex(grid.shape):
                value = complex(f.values[idx])
                writer.writerow([theta[idx], "", psi[idx], value.real, value.imag])
        else:
            raise TypeError(f"unsupported grid {grid!r}")
