import json

import numpy as np
import pytest

import baedyn.sweep as sweep_mod
from baedyn.plots import load_rows
from baedyn.sweep import PRESET_COLUMNS, reproduce_figure


@pytest.fixture
def small_grids(monkeypatch):
    """Shrink the preset grids so preset plumbing tests stay fast."""
    monkeypatch.setattr(sweep_mod, "CURVE_POINTS", 4)
    monkeypatch.setattr(sweep_mod, "MAP_POINTS", 3)
    monkeypatch.setattr(sweep_mod, "INSET_PERIODS", 24)


def read_csv_header(path):
    with open(path) as fh:
        return fh.readline().strip().split(",")


class TestPresetSchemas:
    def test_fig2_schema_contract(self):
        assert PRESET_COLUMNS["fig2"] == [
            "kappa_over_omega", "g_over_omega", "var_xm_exact", "var_xm_numeric",
            "var_xm_adiabatic", "var_xm_slow", "squeezing_db"]

    def test_fig3b_includes_entanglement_columns(self):
        for col in ("E_N_rwa", "E_N_full_mean", "E_N_full_min", "E_N_full_max"):
            assert col in PRESET_COLUMNS["fig3b"]

    def test_fig4_map_columns(self):
        assert "class_label" in PRESET_COLUMNS["fig4b"]
        assert PRESET_COLUMNS["fig4b"] == PRESET_COLUMNS["fig4c"]

    def test_unknown_name_lists_valid_ones(self, tmp_path):
        with pytest.raises(ValueError, match="fig2"):
            reproduce_figure("fig99", tmp_path)


class TestFig2Preset:
    def test_outputs_and_agreement(self, small_grids, tmp_path):
        written = reproduce_figure("fig2", tmp_path, render=True)
        rows = load_rows(written["data"])
        assert read_csv_header(written["data"]) == PRESET_COLUMNS["fig2"]
        assert len(rows) == 3 * 4
        for row in rows:
            assert row["var_xm_numeric"] == pytest.approx(row["var_xm_exact"], rel=1e-6)
        manifest = json.loads(written["manifest"].read_text())
        assert manifest["preset"] == "fig2"
        assert manifest["convergence"]["n_converged"] == len(rows)
        assert written["figure"].exists()

    def test_deterministic_bodies(self, small_grids, tmp_path):
        w1 = reproduce_figure("fig2", tmp_path / "a", render=False)
        w2 = reproduce_figure("fig2", tmp_path / "b", render=False)
        assert w1["data"].read_bytes() == w2["data"].read_bytes()


class TestFig3Presets:
    def test_fig3a_band_ordering(self, small_grids, tmp_path):
        written = reproduce_figure("fig3a", tmp_path, render=True)
        rows = load_rows(written["data"])
        for row in rows:
            assert row["var_xm_full_min"] <= row["var_xm_full_mean"] <= row["var_xm_full_max"]
            assert row["converged"]
        # counter-rotating squeezing loss in the strong-coupling curve
        for row in rows:
            if row["g_over_omega"] == 0.3:
                assert row["var_xm_full_mean"] >= row["var_xm_exact"] * (1 - 1e-9)

    def test_fig3b_emits_inset_companion(self, small_grids, tmp_path):
        written = reproduce_figure("fig3b", tmp_path, render=True)
        assert "inset" in written
        inset = load_rows(written["inset"])
        assert read_csv_header(written["inset"]) == ["time", "E_N_rwa", "E_N_full"]
        assert len(inset) > 10
        assert inset[0]["time"] == 0.0

    def test_fig3d_zoomed_range(self, small_grids, tmp_path):
        written = reproduce_figure("fig3d", tmp_path, render=False)
        rows = load_rows(written["data"])
        assert max(r["kappa_over_omega"] for r in rows) <= 1.0 + 1e-12


class TestFig4Presets:
    def test_fig4a_two_mode_squeezing(self, small_grids, tmp_path):
        written = reproduce_figure("fig4a", tmp_path, render=True)
        rows = load_rows(written["data"])
        assert read_csv_header(written["data"]) == PRESET_COLUMNS["fig4a"]
        for row in rows:
            assert row["duan_full_min"] <= row["duan_full_mean"] <= row["duan_full_max"]

    def test_fig4a_overlay_merge(self, small_grids, tmp_path):
        kappas = sweep_mod._kappa_grid()
        overlay = tmp_path / "adiabatic.csv"
        lines = ["kappa_over_omega,duan_adiabatic"]
        lines += [f"{k:.12e},{0.5:.12e}" for k in kappas[:2]]
        overlay.write_text("\n".join(lines) + "\n")
        written = reproduce_figure("fig4a", tmp_path, render=False, overlay=overlay)
        rows = load_rows(written["data"])
        header = read_csv_header(written["data"])
        assert "duan_adiabatic_overlay" in header
        merged = [r for r in rows if not np.isnan(r["duan_adiabatic_overlay"])]
        assert len(merged) == 2 * 3  # two kappas x three couplings

    def test_fig4b_map_and_manifest_note(self, small_grids, tmp_path):
        written = reproduce_figure("fig4b", tmp_path, render=True)
        rows = load_rows(written["data"])
        assert len(rows) == 3 * 3
        labels = {r["class_label"] for r in rows}
        assert labels <= {"fully-inseparable", "one-mode-biseparable(a)",
                          "one-mode-biseparable(b1)", "one-mode-biseparable(b2)",
                          "two-bipartition-entangled", "ppt-wrt-all", "failed"}
        manifest = json.loads(written["manifest"].read_text())
        assert "estimate" in manifest["grid_note"]
        assert manifest["grid"]["nbar"] == 10.0

    def test_fig4c_differs_only_in_nbar(self, small_grids, tmp_path):
        wb = reproduce_figure("fig4b", tmp_path / "b", render=False)
        wc = reproduce_figure("fig4c", tmp_path / "c", render=False)
        mb = json.loads(wb["manifest"].read_text())
        mc = json.loads(wc["manifest"].read_text())
        assert mb["grid"]["nbar"] == 10.0
        assert mc["grid"]["nbar"] == 100.0
        assert mb["grid"]["kappa"] == mc["grid"]["kappa"]
        assert mb["columns"] == mc["columns"]
