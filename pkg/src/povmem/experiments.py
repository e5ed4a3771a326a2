"""Experiment drivers: desk-scale reproductions of the memory measurements.

Every driver takes a resolved :class:`~povmem.config.ExperimentConfig`, writes
CSV tables (the contract), best-effort figures, and a ``manifest.json``
recording the configuration hash, seed and library versions. Drivers are
serial and all randomness flows from the configured seed, so identical
configurations produce byte-identical CSV output.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import plotting
from .config import ExperimentConfig, StateBlock
from .errors import ConfigError
from .field_core import (
    BGMode,
    GaussianMode,
    GridSpec,
    LGMode,
    POVMode,
    TransverseField,
    export_mask_image,
    make_hologram,
    peak_radius,
    ring_radius,
    synthesize,
)
from .fourier_optics import LensSpec, validate_pov_analytic
from .measurement_tomo import (
    DensityMatrix,
    InterferenceScan,
    estimate_fidelity_from_visibility,
    fidelity,
    interference_scan,
    polarization_scan,
    probabilities,
    reconstruct,
    tomography_settings,
)
from .storage_channel import apply_channel, apply_polarization_channel, mode_efficiency
from .vector_state import TwoDofKet, make_ppb


def _fmt(value) -> str:
    if isinstance(value, (bool,)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)  # RFC-4180: CRLF line endings
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_density_matrix_csv(path: Path, matrix: np.ndarray) -> None:
    """Serialize a 4x4 matrix as 16 complex entries, row-major, re/im pairs."""
    rows = [[entry.real, entry.imag] for entry in np.asarray(matrix).ravel()]
    _write_csv(path, ["re", "im"], rows)


def read_density_matrix_csv(path: Path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.shape != (16, 2):
        raise ValueError(f"expected 16 re,im rows in {path}, got {data.shape}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(4, 4)


def _write_manifest(out_dir: Path, command: str, cfg: ExperimentConfig,
                    outputs: list[Path]) -> Path:
    import matplotlib
    import scipy

    from . import __version__

    payload = {
        "command": command,
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "outputs": sorted(p.name for p in outputs),
        "versions": {
            "povmem": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "matplotlib": matplotlib.__version__,
        },
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _prepare_out_dir(out_dir: str | Path) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _state_pipeline(state: StateBlock, cfg: ExperimentConfig):
    """Build the state, push it through its (possibly per-state-noise) channel."""
    l1, l2, theta = state.labels()
    grid = cfg.grid.to_grid()
    channel = cfg.channel.to_channel(p_dep=state.p_dep, p_phi=state.p_phi)
    ket, fields = make_ppb(l1, l2, theta, cfg.ring.r_r, cfg.ring.w0, grid)
    rho, report = apply_channel(ket, fields, channel)
    return ket, rho, report


@dataclass
class Fig2Result:
    rows: list[dict]
    scans: dict[str, InterferenceScan]
    csv_paths: list[Path]


def run_fig2(cfg: ExperimentConfig, out_dir: str | Path) -> Fig2Result:
    """Interference scans for the configured states through the channel."""
    out = _prepare_out_dir(out_dir)
    alphas = cfg.scan.alphas()
    rows: list[dict] = []
    scans: dict[str, InterferenceScan] = {}
    outputs: list[Path] = []
    for state in cfg.states:
        _, rho, report = _state_pipeline(state, cfg)
        scan = interference_scan(rho, alphas)
        scans[state.name] = scan
        scan_path = out / f"scan_{state.name}.csv"
        _write_csv(
            scan_path,
            ["alpha_rad", "intensity", "fit_theta", "fit_V"],
            [[a, i, scan.theta, scan.visibility]
             for a, i in zip(scan.alphas, scan.intensities)],
        )
        outputs.append(scan_path)
        rows.append({
            "state": state.name,
            "descriptor": state.descriptor,
            "fit_theta": scan.theta,
            "fit_V": scan.visibility,
            "eta1": report.eta1,
            "eta2": report.eta2,
            "kappa": report.kappa,
        })
    summary = out / "fig2_summary.csv"
    _write_csv(
        summary,
        ["state", "descriptor", "fit_theta", "fit_V", "eta1", "eta2", "kappa"],
        [[r["state"], r["descriptor"], r["fit_theta"], r["fit_V"],
          r["eta1"], r["eta2"], r["kappa"]] for r in rows],
    )
    outputs.append(summary)
    figure = out / "fig2_scans.png"
    plotting.plot_interference_scans(scans, figure)
    outputs.append(figure)
    outputs.append(_write_manifest(out, "fig2", cfg, outputs))
    return Fig2Result(rows=rows, scans=scans, csv_paths=[p for p in outputs
                                                         if p.suffix == ".csv"])


@dataclass
class Fig3Result:
    rows: list[dict]
    matrices: dict[str, np.ndarray]


def run_fig3(cfg: ExperimentConfig, out_dir: str | Path) -> Fig3Result:
    """Full tomography per state: probabilities, reconstruction, fidelity."""
    out = _prepare_out_dir(out_dir)
    rng = np.random.default_rng(cfg.seed)
    counts = cfg.tomography.counts_per_setting
    rows: list[dict] = []
    matrices: dict[str, np.ndarray] = {}
    outputs: list[Path] = []
    for state in cfg.states:
        l1, l2, _ = state.labels()
        ket, rho, report = _state_pipeline(state, cfg)
        ideal = DensityMatrix.from_ket(ket.amplitudes)
        settings = tomography_settings(l1, l2)
        probs = probabilities(rho, settings)
        if counts > 0:
            probs = np.clip(rng.poisson(probs * counts) / counts, 0.0, 1.0)
        recon = reconstruct(probs, settings, method=cfg.tomography.method)
        matrices[state.name] = recon.matrix
        rho_path = out / f"rho_{state.name}.csv"
        write_density_matrix_csv(rho_path, recon.matrix)
        outputs.append(rho_path)
        figure = out / f"rho_{state.name}.png"
        plotting.plot_density_matrix(recon.matrix, ideal.matrix, state.name, figure)
        outputs.append(figure)
        rows.append({
            "state": state.name,
            "descriptor": state.descriptor,
            "fidelity_reconstructed": fidelity(recon, ideal),
            "fidelity_channel_exact": fidelity(rho, ideal),
            "predicted_fidelity_kappa": report.predicted_fidelity,
            "eta1": report.eta1,
            "eta2": report.eta2,
            "kappa": report.kappa,
        })
    table = out / "fig3_fidelity.csv"
    _write_csv(
        table,
        ["state", "descriptor", "fidelity_reconstructed", "fidelity_channel_exact",
         "predicted_fidelity_kappa", "eta1", "eta2", "kappa"],
        [[r["state"], r["descriptor"], r["fidelity_reconstructed"],
          r["fidelity_channel_exact"], r["predicted_fidelity_kappa"],
          r["eta1"], r["eta2"], r["kappa"]] for r in rows],
    )
    outputs.append(table)
    outputs.append(_write_manifest(out, "fig3", cfg, outputs))
    return Fig3Result(rows=rows, matrices=matrices)


@dataclass
class Fig4Result:
    l_values: list[int]
    fidelity_grid: np.ndarray
    rows: list[dict]


def _grid_eval_fields(cfg: ExperimentConfig) -> tuple[dict[int, TransverseField], GridSpec]:
    """One normalized arm mode per charge, on the realization's grid."""
    block = cfg.grid_eval
    l_values = range(block.l_min, block.l_max + 1)
    if block.realization == "pov":
        grid = cfg.grid.to_grid()
        return {
            l: synthesize(POVMode(l, cfg.ring.r_r, cfg.ring.w0), grid)
            for l in l_values
        }, grid
    w0 = block.lg_w0_mm * 1e-3
    grid = GridSpec(cfg.grid.n, block.lg_pitch_um * 1e-6,
                    cfg.grid.wavelength_nm * 1e-9)
    return {l: synthesize(LGMode(l, w0), grid) for l in l_values}, grid


def run_fig4(cfg: ExperimentConfig, out_dir: str | Path) -> Fig4Result:
    """Estimated fidelity over every (L1, L2) pair in the configured range.

    Off-diagonal pairs average the mode-phase and polarization-phase scan
    visibilities; diagonal pairs carry no mode qubit and use the polarization
    visibility alone.
    """
    out = _prepare_out_dir(out_dir)
    block = cfg.grid_eval
    alphas = cfg.scan.alphas()
    channel = cfg.channel.to_channel()
    arm_fields, _ = _grid_eval_fields(cfg)
    efficiencies = {l: mode_efficiency(f, channel) for l, f in arm_fields.items()}
    l_values = list(range(block.l_min, block.l_max + 1))
    bound = max(5, max(abs(l) for l in l_values))
    grid_vals = np.zeros((len(l_values), len(l_values)))
    rows: list[dict] = []
    for i, l1 in enumerate(l_values):
        for j, l2 in enumerate(l_values):
            eta1, eta2 = efficiencies[l1], efficiencies[l2]
            if l1 == l2:
                rho2 = apply_polarization_channel(0.0, channel)
                v_pol = polarization_scan(rho2, alphas).visibility
                v_oam = None
                v_mean = v_pol
            else:
                ket = TwoDofKet.create([1.0, 0.0, 0.0, 1.0], l1, l2, l_bound=bound)
                rho, _ = apply_channel(ket, None, channel,
                                       efficiencies=(eta1, eta2))
                v_oam = interference_scan(rho, alphas, scan_dof="oam").visibility
                v_pol = interference_scan(rho, alphas, scan_dof="pol").visibility
                v_mean = 0.5 * (v_oam + v_pol)
            f_est = estimate_fidelity_from_visibility(v_mean)
            grid_vals[i, j] = f_est
            rows.append({
                "l1": l1, "l2": l2, "eta1": eta1, "eta2": eta2,
                "kappa": eta2 / eta1, "v_oam": v_oam, "v_pol": v_pol,
                "v_mean": v_mean, "fidelity_est": f_est,
            })
    long_path = out / "fig4_entries.csv"
    _write_csv(
        long_path,
        ["l1", "l2", "eta1", "eta2", "kappa", "v_oam", "v_pol", "v_mean",
         "fidelity_est"],
        [[r["l1"], r["l2"], r["eta1"], r["eta2"], r["kappa"],
          "" if r["v_oam"] is None else r["v_oam"], r["v_pol"], r["v_mean"],
          r["fidelity_est"]] for r in rows],
    )
    wide_path = out / "fig4_grid.csv"
    _write_csv(
        wide_path,
        ["l1\\l2"] + [str(l) for l in l_values],
        [[l1] + list(grid_vals[i]) for i, l1 in enumerate(l_values)],
    )
    heatmap = out / "fig4_heatmap.png"
    plotting.plot_fidelity_heatmap(grid_vals, l_values, heatmap)
    outputs = [long_path, wide_path, heatmap]
    outputs.append(_write_manifest(out, "fig4", cfg, outputs))
    return Fig4Result(l_values=l_values, fidelity_grid=grid_vals, rows=rows)


@dataclass
class RadiusSweepResult:
    rows: list[dict]


def run_radius_sweep(cfg: ExperimentConfig, out_dir: str | Path) -> RadiusSweepResult:
    """Ring radius and storage efficiency vs charge, ring modes vs vortex modes."""
    out = _prepare_out_dir(out_dir)
    block = cfg.radius_sweep
    grid = cfg.grid.to_grid()
    channel = cfg.channel.to_channel()
    rows: list[dict] = []
    for l in range(block.l_min, block.l_max + 1):
        field = synthesize(POVMode(l, cfg.ring.r_r, cfg.ring.w0), grid)
        rows.append({
            "family": "pov", "l": l,
            "centroid_radius_um": ring_radius(field) * 1e6,
            "peak_radius_um": peak_radius(field) * 1e6,
            "efficiency": mode_efficiency(field, channel),
        })
    for l in range(block.l_min, block.l_max + 1):
        field = synthesize(LGMode(l, block.lg_w0_um * 1e-6), grid)
        rows.append({
            "family": "lg", "l": l,
            "centroid_radius_um": ring_radius(field) * 1e6,
            "peak_radius_um": peak_radius(field) * 1e6,
            "efficiency": mode_efficiency(field, channel),
        })
    table = out / "radius_sweep.csv"
    _write_csv(
        table,
        ["family", "l", "centroid_radius_um", "peak_radius_um", "efficiency"],
        [[r["family"], r["l"], r["centroid_radius_um"], r["peak_radius_um"],
          r["efficiency"]] for r in rows],
    )
    figure = out / "radius_sweep.png"
    plotting.plot_radius_sweep(rows, figure)
    _write_manifest(out, "radius-sweep", cfg, [table, figure])
    return RadiusSweepResult(rows=rows)


@dataclass
class PovValidationResult:
    rows: list[dict]


def run_validate_pov(cfg: ExperimentConfig, out_dir: str | Path) -> PovValidationResult:
    """Residual between the transformed Bessel ring and the analytic ring,
    swept over the ring-radius-to-thickness ratio."""
    out = _prepare_out_dir(out_dir)
    block = cfg.pov_validation
    wavelength = cfg.grid.wavelength_nm * 1e-9
    f = block.focal_length_mm * 1e-3
    w0 = block.w0_um * 1e-6
    k = 2.0 * np.pi / wavelength
    in_pitch = wavelength * f / (block.n * block.output_pitch_um * 1e-6)
    grid = GridSpec(block.n, in_pitch, wavelength)
    lens = LensSpec(f)
    w_env = 2.0 * f / (k * w0)
    rows: list[dict] = []
    for ratio in block.ratios:
        r_r = ratio * w0
        k_r = r_r * k / f
        residual = validate_pov_analytic(BGMode(block.l, k_r, w_env), lens, grid)
        rows.append({
            "ratio": ratio, "r_r_um": r_r * 1e6, "w0_um": w0 * 1e6,
            "k_r_per_m": k_r, "residual": residual,
        })
    table = out / "pov_validation.csv"
    _write_csv(
        table,
        ["ratio", "r_r_um", "w0_um", "k_r_per_m", "residual"],
        [[r["ratio"], r["r_r_um"], r["w0_um"], r["k_r_per_m"], r["residual"]]
         for r in rows],
    )
    figure = out / "pov_validation.png"
    plotting.plot_pov_residuals([r["ratio"] for r in rows],
                                [r["residual"] for r in rows], figure)
    _write_manifest(out, "validate-pov", cfg, [table, figure])
    return PovValidationResult(rows=rows)


@dataclass
class HologramResult:
    paths: list[Path]


def _hologram_mode(cfg: ExperimentConfig):
    block = cfg.hologram
    if block.mode == "gaussian":
        return GaussianMode(block.w0_um * 1e-6)
    if block.mode == "lg":
        return LGMode(block.l, block.w0_um * 1e-6)
    if block.mode == "bg":
        return BGMode(block.l, block.k_r_per_mm * 1e3, block.w0_um * 1e-6)
    if block.mode == "pov":
        return POVMode(block.l, block.r_r_um * 1e-6, block.w0_um * 1e-6)
    raise ConfigError(f"unknown hologram mode {block.mode!r}")


def run_hologram(cfg: ExperimentConfig, out_dir: str | Path) -> HologramResult:
    """Export the phase mask for the configured target mode as PNG and PGM."""
    out = _prepare_out_dir(out_dir)
    block = cfg.hologram
    mask = make_hologram(_hologram_mode(cfg), cfg.grid.to_grid(),
                         block.carrier_period_um * 1e-6)
    stem = f"mask_{block.mode}_l{block.l}"
    paths = [out / f"{stem}.png", out / f"{stem}.pgm"]
    for path in paths:
        export_mask_image(mask, path)
    _write_manifest(out, "hologram", cfg, paths)
    return HologramResult(paths=paths)
