import json
from pathlib import Path

import numpy as np
import pytest

from povmem.cli import main
from povmem.config import config_from_dict
from povmem.experiments import (
    read_density_matrix_csv,
    run_fig2,
    run_fig3,
    run_fig4,
    run_radius_sweep,
)

# small, fast configuration: 128-sample grid with a 4-pixel-thick ring
SMOKE = {
    "seed": 2024,
    "grid": {"n": 128, "pitch_um": 6.25},
    "ring": {"r_r_um": 100.0, "w0_um": 25.0},
    "scan": {"alpha_points": 16},
    "grid_eval": {"l_min": -2, "l_max": 2},
    "radius_sweep": {"l_min": -3, "l_max": 3, "lg_w0_um": 60.0},
    "pov_validation": {"n": 128, "output_pitch_um": 4.0, "w0_um": 14.0,
                       "ratios": [5.0, 6.0]},
}


@pytest.fixture()
def smoke_config(tmp_path) -> Path:
    path = tmp_path / "smoke.json"
    path.write_text(json.dumps(SMOKE))
    return path


def read_csv_lines(path: Path) -> list[str]:
    return path.read_text().splitlines()


class TestVerbs:
    def test_fig2_outputs(self, smoke_config, tmp_path):
        out = tmp_path / "fig2"
        assert main(["fig2", "--config", str(smoke_config), "--out", str(out)]) == 0
        for name in ["scan_psi1.csv", "scan_psi2.csv", "scan_psi3.csv",
                     "scan_psi4.csv", "fig2_summary.csv", "fig2_scans.png",
                     "manifest.json"]:
            assert (out / name).exists()
        header = read_csv_lines(out / "scan_psi1.csv")[0]
        assert header == "alpha_rad,intensity,fit_theta,fit_V"
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "fig2"
        assert manifest["seed"] == 2024
        assert "config_sha256" in manifest and "versions" in manifest

    def test_fig3_outputs_and_serialization(self, smoke_config, tmp_path):
        out = tmp_path / "fig3"
        assert main(["fig3", "--config", str(smoke_config), "--out", str(out)]) == 0
        table = read_csv_lines(out / "fig3_fidelity.csv")
        assert table[0].startswith("state,descriptor,fidelity_reconstructed")
        rho = read_density_matrix_csv(out / "rho_psi2.csv")
        assert rho.shape == (4, 4)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)
        lines = read_csv_lines(out / "rho_psi2.csv")
        assert lines[0] == "re,im"
        assert len(lines) == 17  # header + 16 row-major entries

    def test_fig4_outputs(self, smoke_config, tmp_path):
        out = tmp_path / "fig4"
        assert main(["fig4", "--config", str(smoke_config), "--out", str(out)]) == 0
        entries = read_csv_lines(out / "fig4_entries.csv")
        assert entries[0] == "l1,l2,eta1,eta2,kappa,v_oam,v_pol,v_mean,fidelity_est"
        assert len(entries) == 1 + 25  # header + 5x5 grid
        grid = np.loadtxt(out / "fig4_grid.csv", delimiter=",", skiprows=1)
        assert grid.shape == (5, 6)  # l1 label column + 5 values
        values = grid[:, 1:]
        assert values.min() >= 0.0 and values.max() <= 1.0
        assert (out / "fig4_heatmap.png").exists()

    def test_radius_sweep_outputs(self, smoke_config, tmp_path):
        out = tmp_path / "sweep"
        assert main(["radius-sweep", "--config", str(smoke_config),
                     "--out", str(out)]) == 0
        lines = read_csv_lines(out / "radius_sweep.csv")
        assert lines[0] == "family,l,centroid_radius_um,peak_radius_um,efficiency"
        assert len(lines) == 1 + 2 * 7
        assert (out / "radius_sweep.png").exists()

    def test_hologram_outputs(self, smoke_config, tmp_path):
        out = tmp_path / "holo"
        assert main(["hologram", "--config", str(smoke_config),
                     "--out", str(out)]) == 0
        assert (out / "mask_bg_l3.png").exists()
        assert (out / "mask_bg_l3.pgm").exists()

    def test_validate_pov_outputs(self, smoke_config, tmp_path):
        out = tmp_path / "vpov"
        assert main(["validate-pov", "--config", str(smoke_config),
                     "--out", str(out)]) == 0
        lines = read_csv_lines(out / "pov_validation.csv")
        assert lines[0] == "ratio,r_r_um,w0_um,k_r_per_m,residual"
        assert len(lines) == 3

    def test_seed_override(self, smoke_config, tmp_path):
        out = tmp_path / "seeded"
        assert main(["fig2", "--config", str(smoke_config), "--out", str(out),
                     "--seed", "77"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 77


class TestExitCodes:
    def test_config_error_is_2(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("[grid]\nn = 100\n")
        assert main(["fig2", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2

    def test_missing_config_is_2(self, tmp_path):
        assert main(["fig2", "--config", str(tmp_path / "nope.toml"),
                     "--out", str(tmp_path / "o")]) == 2

    def test_numerical_failure_is_3(self, tmp_path):
        cfg = dict(SMOKE)
        cfg["pov_validation"] = {"n": 128, "output_pitch_um": 4.0,
                                 "w0_um": 14.0,
                                 "ratios": [2.0]}  # below the validity regime
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert main(["validate-pov", "--config", str(path),
                     "--out", str(tmp_path / "o")]) == 3

    def test_negative_seed_is_2(self, smoke_config, tmp_path):
        assert main(["fig2", "--config", str(smoke_config),
                     "--out", str(tmp_path / "o"), "--seed", "-4"]) == 2


class TestDeterminism:
    def test_identical_runs_byte_identical_csvs(self, tmp_path):
        cfg = config_from_dict(SMOKE)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_fig2(cfg, out_a)
        run_fig2(cfg, out_b)
        for name in ["scan_psi1.csv", "scan_psi3.csv", "fig2_summary.csv"]:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_poisson_run_reproducible_with_seed(self, tmp_path):
        data = dict(SMOKE)
        data["tomography"] = {"method": "linear", "counts_per_setting": 2000}
        cfg = config_from_dict(data)
        res_a = run_fig3(cfg, tmp_path / "a")
        res_b = run_fig3(cfg, tmp_path / "b")
        for name in res_a.matrices:
            np.testing.assert_array_equal(res_a.matrices[name],
                                          res_b.matrices[name])
        assert ((tmp_path / "a" / "rho_psi1.csv").read_bytes()
                == (tmp_path / "b" / "rho_psi1.csv").read_bytes())

    def test_different_seed_changes_poisson_output(self, tmp_path):
        data = dict(SMOKE)
        data["tomography"] = {"method": "linear", "counts_per_setting": 2000}
        cfg_a = config_from_dict(data)
        cfg_b = config_from_dict({**data, "seed": 4096})
        res_a = run_fig3(cfg_a, tmp_path / "a")
        res_b = run_fig3(cfg_b, tmp_path / "b")
        assert any(
            not np.array_equal(res_a.matrices[n], res_b.matrices[n])
            for n in res_a.matrices
        )


class TestDriverResults:
    def test_fig2_noiseless_summary(self, tmp_path):
        cfg = config_from_dict(SMOKE)
        result = run_fig2(cfg, tmp_path / "fig2")
        thetas = {r["state"]: r["fit_theta"] for r in result.rows}
        expected = {"psi1": 0.0, "psi2": np.pi / 2, "psi3": np.pi,
                    "psi4": 3 * np.pi / 2}
        for name, theta in expected.items():
            delta = np.mod(thetas[name] - theta + np.pi, 2 * np.pi) - np.pi
            assert abs(delta) < 1e-9
        assert all(r["fit_V"] == pytest.approx(1.0, abs=1e-9)
                   for r in result.rows)

    def test_fig4_grid_symmetric_and_high(self, tmp_path):
        cfg = config_from_dict(SMOKE)
        result = run_fig4(cfg, tmp_path / "fig4")
        grid = result.fidelity_grid
        np.testing.assert_allclose(grid, grid.T, atol=1e-12)
        assert grid.min() >= 0.99

    def test_radius_sweep_rows(self, tmp_path):
        cfg = config_from_dict(SMOKE)
        result = run_radius_sweep(cfg, tmp_path / "sweep")
        pov = [r for r in result.rows if r["family"] == "pov"]
        radii = [r["centroid_radius_um"] for r in pov]
        assert np.ptp(radii) / np.mean(radii) < 0.01
        lg = {r["l"]: r for r in result.rows if r["family"] == "lg"}
        assert lg[3]["peak_radius_um"] == pytest.approx(
            60.0 * np.sqrt(1.5), rel=0.02)

    def test_radius_sweep_extended_charge_range(self, tmp_path):
        # optional extension beyond the default range: the analytic ring stays
        # flat in both radius and efficiency out to |l| = 12
        data = dict(SMOKE)
        data["grid"] = {"n": 256, "pitch_um": 3.125}
        data["ring"] = {"r_r_um": 100.0, "w0_um": 10.0}
        data["radius_sweep"] = {"l_min": -12, "l_max": 12, "lg_w0_um": 40.0}
        cfg = config_from_dict(data)
        result = run_radius_sweep(cfg, tmp_path / "wide")
        pov = [r for r in result.rows if r["family"] == "pov"]
        assert len(pov) == 25
        radii = [r["centroid_radius_um"] for r in pov]
        etas = [r["efficiency"] for r in pov]
        assert np.ptp(radii) / np.mean(radii) < 0.01
        assert np.ptp(etas) / np.mean(etas) < 0.005
