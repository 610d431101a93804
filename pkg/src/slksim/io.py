"""File emission: CSV outputs and the JSON run manifest.

Contracts kept here so every writer agrees:

* floats are emitted with 17 significant digits (value-preserving round trip),
* all files use UNIX line endings,
* filenames are deterministic, so a rerun with the same config is
  byte-identical,
* NaN values (absent points of the reconstructed potential) are emitted as
  empty fields,
* ``manifest.json`` embeds the fully resolved config; feeding a manifest back
  as a config replays the identical run.
"""

from __future__ import annotations

import json
import math
import os
from typing import Iterable

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .experiments import EnsembleResult, ExperimentResult
from .observables import Snapshot
from .potentials import PotentialField
from .spectral import SpectrumResult


def fmt(x: float) -> str:
    """One float, 17 significant digits; NaN becomes an empty (absent) field."""
    if math.isnan(x):
        return ""
    return f"{x:.17g}"


def _write_rows(path: str, header: str, rows: Iterable[Iterable[float]]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_series_csv(path: str, series) -> None:
    cols = [("t", series.times), ("norm", series.norm), ("energy", series.energy)]
    if series.overlap is not None:
        cols.append(("overlap", series.overlap))
    if series.arrival_prob is not None:
        cols.append(("arrival_prob", series.arrival_prob))
    header = ",".join(name for name, _ in cols)
    data = np.column_stack([c for _, c in cols])
    _write_rows(path, header, data)


def write_snapshot_csv(path: str, x: np.ndarray, snap: Snapshot, V: np.ndarray) -> None:
    w = snap.w.values if snap.w is not None else np.full(x.size, np.nan)
    rows = np.column_stack([x, snap.density_phase.rho, snap.density_phase.phase, V, w])
    _write_rows(path, "x,rho,S,V,W", rows)


def write_density_map_csv(
    path: str, times: np.ndarray, sites: np.ndarray, rho: np.ndarray
) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,x,rho\n")
        for ti, row in zip(times, rho):
            t_str = fmt(float(ti))
            for xi, ri in zip(sites, row):
                fh.write(f"{t_str},{fmt(float(xi))},{fmt(float(ri))}\n")


def write_potential_csv(path: str, field: PotentialField) -> None:
    _write_rows(path, "x,V", np.column_stack([field.domain.points(), field.values]))


def write_spectrum_csv(path: str, spectrum: SpectrumResult) -> None:
    rows = ((i, w) for i, w in enumerate(spectrum.eigenvalues))
    _write_rows(path, "index,eigenvalue", rows)


def write_ground_state_csv(path: str, spectrum: SpectrumResult) -> None:
    gs = spectrum.ground_state
    rows = np.column_stack([gs.domain.points(), gs.amplitudes.real])
    _write_rows(path, "x,amplitude", rows)


def _write_manifest(path: str, config_dict: dict, outputs: dict, derived: dict) -> None:
    manifest = {
        "config": config_dict,
        "derived": derived,
        "outputs": outputs,
        "runtime": {"package": f"slksim {__version__}", "kernel_backend": BACKEND},
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_outputs(result: ExperimentResult, out_dir: str) -> dict:
    """Write every file for one run; returns the manifest dict."""
    os.makedirs(out_dir, exist_ok=True)
    run = result.run
    outputs: dict = {"series": "series.csv", "potential": "potential.csv"}
    write_series_csv(os.path.join(out_dir, "series.csv"), run.series)
    write_potential_csv(os.path.join(out_dir, "potential.csv"), result.potential)

    if run.snapshots:
        snap_dir = os.path.join(out_dir, "snapshots")
        os.makedirs(snap_dir, exist_ok=True)
        x = result.potential.domain.points()
        names = []
        for snap in run.snapshots:
            name = f"t_{snap.time:g}.csv"
            write_snapshot_csv(
                os.path.join(snap_dir, name), x, snap, result.potential.values
            )
            names.append(f"snapshots/{name}")
        outputs["snapshots"] = names

    if run.density_map is not None:
        write_density_map_csv(
            os.path.join(out_dir, "density_map.csv"),
            run.density_times,
            result.potential.domain.points(),
            run.density_map,
        )
        outputs["density_map"] = "density_map.csv"

    _write_manifest(
        os.path.join(out_dir, "manifest.json"),
        result.config.as_dict(),
        outputs,
        result.derived,
    )
    outputs["manifest"] = "manifest.json"
    return {"config": result.config.as_dict(), "outputs": outputs}


def emit_ensemble(ens: EnsembleResult, out_dir: str) -> dict:
    """Write per-realization arrival curves plus the quartile summary."""
    os.makedirs(out_dir, exist_ok=True)
    real_dir = os.path.join(out_dir, "realizations")
    os.makedirs(real_dir, exist_ok=True)
    names = []
    for seed, curve in zip(ens.seeds, ens.arrival):
        name = f"seed_{seed}.csv"
        _write_rows(
            os.path.join(real_dir, name),
            "t,arrival_prob",
            np.column_stack([ens.times, curve]),
        )
        names.append(f"realizations/{name}")
    _write_rows(
        os.path.join(out_dir, "ensemble_summary.csv"),
        "t,q25,median,q75",
        np.column_stack([ens.times, ens.q25, ens.median, ens.q75]),
    )
    outputs = {"summary": "ensemble_summary.csv", "realizations": names}
    config = dict(ens.config.as_dict())
    config["n_realizations"] = len(ens.seeds)
    _write_manifest(os.path.join(out_dir, "manifest.json"), config, outputs, {})
    outputs["manifest"] = "manifest.json"
    return {"config": config, "outputs": outputs}


def emit_spectrum(
    spectrum: SpectrumResult, config_dict: dict, out_dir: str
) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    write_spectrum_csv(os.path.join(out_dir, "spectrum.csv"), spectrum)
    write_ground_state_csv(os.path.join(out_dir, "ground_state.csv"), spectrum)
    outputs = {"spectrum": "spectrum.csv", "ground_state": "ground_state.csv"}
    _write_manifest(os.path.join(out_dir, "manifest.json"), config_dict, outputs, {})
    outputs["manifest"] = "manifest.json"
    return {"config": config_dict, "outputs": outputs}


def load_config(path: str) -> dict:
    """Read a config file; a manifest is accepted and unwrapped."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "config" in data and "kind" not in data:
        data = data["config"]
    return data
