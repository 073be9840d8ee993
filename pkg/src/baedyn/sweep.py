"""Parameter sweeps, figure-reproduction presets, CSV/JSON export."""

from __future__ import annotations

import csv
import datetime
import json
import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import adiabatic_variance, slow_cavity_variance, steady_state_rwa
from .classify import scan_region
from .config import RunConfig, SweepAxis
from .errors import ConvergenceError, DivergenceError, NumericalError
from .gaussian import log_negativity, squeezing_db, two_mode_squeezing_db
from .model import ThreeModeParams, TwoModeParams, build_model, thermal_product
from .riccati import integrate_riccati, periodic_steady_state

FIG2_G_VALUES = (0.01, 0.05, 0.3)
FIG2_KAPPA_RANGE = (1e-3, 1e2)
CURVE_POINTS = 60
MAP_POINTS = 40
FIG4_KAPPA_RANGE = (1e-2, 1e1)
FIG4_G_RANGE = (1e-2, 1.0)
FIG3D_KAPPA_RANGE = (1e-3, 1.0)
INSET_CUT = {"kappa": 0.05, "g": 0.05}
INSET_PERIODS = 640
FIGURE_NAMES = ("fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c")

_BASE = dict(gamma=1e-4, nbar=10.0, eta=1.0)


# ---------------------------------------------------------------------------
# generic sweep


def run_sweep(config: RunConfig, threads: int = 1):
    """Execute the per-point pipeline over the configured grid.

    Rows come back in grid order regardless of thread count; per-point
    failures are flagged in-row and never abort the sweep.
    """
    points = _grid_points(config)
    if config.system == "two-mode":
        worker = lambda pt: _two_mode_row(config, pt)
    else:
        worker = lambda pt: _three_mode_row(config, pt)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(worker, points))
    else:
        rows = [worker(pt) for pt in points]
    return rows


def _grid_points(config: RunConfig):
    if not config.axes:
        return [{}]
    if len(config.axes) == 1:
        ax = config.axes[0]
        return [{ax.parameter: float(v)} for v in ax.values()]
    ax1, ax2 = config.axes[0], config.axes[1]
    return [{ax1.parameter: float(v1), ax2.parameter: float(v2)}
            for v1 in ax1.values() for v2 in ax2.values()]


def _point_config(config: RunConfig, point: dict) -> RunConfig:
    return replace(config, **point) if point else config


def _two_mode_row(config: RunConfig, point: dict) -> dict:
    cfg = _point_config(config, point)
    row = {"kappa_over_omega": cfg.kappa, "g_over_omega": cfg.g}
    row.update(point)
    try:
        params = cfg.params()
        exact = steady_state_rwa(params)
        row["var_xm_exact"] = exact.cm.variance(2)
        row["var_pm_exact"] = exact.cm.variance(3)
        if params.eta > 0:
            row["var_xm_adiabatic"] = adiabatic_variance(params)
            row["var_xm_slow"] = slow_cavity_variance(params)
        else:
            row["var_xm_adiabatic"] = float("nan")
            row["var_xm_slow"] = float("nan")
        state = periodic_steady_state(build_model(params, spec=cfg.measurement(), rwa=cfg.rwa),
                                      dt=cfg.dt, tol=cfg.tol, max_periods=cfg.max_periods,
                                      samples_per_period=cfg.samples_per_period)
        stats = state.per_element_stats
        row.update({
            "var_xm_mean": stats["mean"][2, 2], "var_xm_min": stats["min"][2, 2],
            "var_xm_max": stats["max"][2, 2],
            "var_xc_mean": stats["mean"][0, 0],
            "var_pc_mean": stats["mean"][1, 1],
            "var_pm_mean": stats["mean"][3, 3],
            "squeezing_db_mean": squeezing_db(stats["mean"][2, 2]),
        })
        ens = [log_negativity(cm, {0}) for cm in state.covariances]
        row.update({"E_N_mean": float(np.mean(ens)), "E_N_min": float(np.min(ens)),
                    "E_N_max": float(np.max(ens)),
                    "converged": state.converged, "residual": state.residual,
                    "periods": state.periods_used, "error": ""})
    except (ConvergenceError, DivergenceError, NumericalError, ValueError) as exc:
        row.update({"converged": False, "error": str(exc)})
    return row


def _three_mode_row(config: RunConfig, point: dict) -> dict:
    cfg = _point_config(config, point)
    rows = scan_region([cfg.kappa], [cfg.g], cfg.params(), rwa=cfg.rwa,
                       dt=cfg.dt, tol=cfg.tol, max_periods=cfg.max_periods)
    row = rows[0]
    row.update(point)
    return row


# ---------------------------------------------------------------------------
# figure presets


def _kappa_grid(rng=FIG2_KAPPA_RANGE, n=None):
    return np.geomspace(rng[0], rng[1], n if n is not None else CURVE_POINTS)


def _curve_worker_two_mode(kap: float, g: float, rwa_only: bool, tol: float):
    params = TwoModeParams(g=g, kappa=kap, **_BASE)
    exact = steady_state_rwa(params)
    row = {
        "kappa_over_omega": kap,
        "g_over_omega": g,
        "var_xm_exact": exact.cm.variance(2),
        "var_xm_adiabatic": adiabatic_variance(params),
        "var_xm_slow": slow_cavity_variance(params),
    }
    rwa_state = periodic_steady_state(build_model(params, rwa=True), tol=tol)
    row["var_xm_numeric"] = rwa_state.mean_cm.variance(2)
    row["squeezing_db"] = squeezing_db(row["var_xm_exact"])
    row["E_N_rwa"] = log_negativity(exact.cm, {0})
    row["var_xc_rwa"] = exact.cm.variance(0)
    if rwa_only:
        row.update({"converged": rwa_state.converged, "residual": rwa_state.residual,
                    "periods": rwa_state.periods_used, "error": ""})
        return row
    state = periodic_steady_state(build_model(params, rwa=False), tol=tol)
    stats = state.per_element_stats
    ens = [log_negativity(cm, {0}) for cm in state.covariances]
    row.update({
        "var_xm_full_mean": stats["mean"][2, 2],
        "var_xm_full_min": stats["min"][2, 2],
        "var_xm_full_max": stats["max"][2, 2],
        "var_xc_full_mean": stats["mean"][0, 0],
        "var_xc_full_min": stats["min"][0, 0],
        "var_xc_full_max": stats["max"][0, 0],
        "E_N_full_mean": float(np.mean(ens)),
        "E_N_full_min": float(np.min(ens)),
        "E_N_full_max": float(np.max(ens)),
        "squeezing_db_rwa": squeezing_db(row["var_xm_exact"]),
        "squeezing_db_full_mean": squeezing_db(stats["mean"][2, 2]),
        "converged": state.converged,
        "residual": state.residual,
        "periods": state.periods_used,
        "error": "",
    })
    return row


def _curve_worker_three_mode(kap: float, g: float, tol: float, nbar: float):
    params = ThreeModeParams(g=g, kappa=kap, gamma=_BASE["gamma"], nbar=nbar,
                             eta=_BASE["eta"], omega_split=0.1)
    from .gaussian import duan_sum

    row = {"kappa_over_omega": kap, "g_over_omega": g}
    rwa_state = periodic_steady_state(build_model(params, rwa=True), tol=tol)
    duan_rwa = duan_sum(rwa_state.mean_cm, 1, 2)
    row["duan_rwa"] = duan_rwa
    row["ts_db_rwa"] = two_mode_squeezing_db(duan_rwa)
    state = periodic_steady_state(build_model(params, rwa=False), tol=tol)
    duans = [duan_sum(cm, 1, 2) for cm in state.covariances]
    stats = state.per_element_stats
    duan_mean = float(np.mean(duans))
    row.update({
        "duan_full_mean": duan_mean,
        "duan_full_min": float(np.min(duans)),
        "duan_full_max": float(np.max(duans)),
        "ts_db_full_mean": two_mode_squeezing_db(duan_mean),
        "var_xc_full_mean": stats["mean"][0, 0],
        "converged": state.converged,
        "residual": state.residual,
        "periods": state.periods_used,
        "error": "",
    })
    return row


def _run_points(worker, points, threads):
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda p: worker(*p), points))
    return [worker(*p) for p in points]


_FIG2_COLUMNS = ["kappa_over_omega", "g_over_omega", "var_xm_exact", "var_xm_numeric",
                 "var_xm_adiabatic", "var_xm_slow", "squeezing_db"]
_FIG3A_COLUMNS = ["kappa_over_omega", "g_over_omega", "var_xm_exact", "var_xm_adiabatic",
                  "var_xm_full_mean", "var_xm_full_min", "var_xm_full_max",
                  "squeezing_db_rwa", "squeezing_db_full_mean", "converged",
                  "residual", "periods", "error"]
_FIG3B_COLUMNS = ["kappa_over_omega", "g_over_omega", "E_N_rwa", "E_N_full_mean",
                  "E_N_full_min", "E_N_full_max", "converged", "residual",
                  "periods", "error"]
_FIG3C_COLUMNS = ["kappa_over_omega", "g_over_omega", "var_xc_rwa", "var_xc_full_mean",
                  "var_xc_full_min", "var_xc_full_max", "converged", "residual",
                  "periods", "error"]
_FIG4A_COLUMNS = ["kappa_over_omega", "g_over_omega", "duan_rwa", "duan_full_mean",
                  "duan_full_min", "duan_full_max", "ts_db_rwa", "ts_db_full_mean",
                  "var_xc_full_mean", "converged", "residual", "periods", "error"]
_FIG4MAP_COLUMNS = ["kappa_over_omega", "g_over_omega", "class_label", "class_label_min",
                    "E_N_a", "E_N_b1", "E_N_b2", "duan_value", "duan_max",
                    "duan_violation", "converged", "residual", "periods", "error"]

PRESET_COLUMNS = {
    "fig2": _FIG2_COLUMNS,
    "fig3a": _FIG3A_COLUMNS,
    "fig3b": _FIG3B_COLUMNS,
    "fig3c": _FIG3C_COLUMNS,
    "fig3d": _FIG3B_COLUMNS,
    "fig4a": _FIG4A_COLUMNS,
    "fig4b": _FIG4MAP_COLUMNS,
    "fig4c": _FIG4MAP_COLUMNS,
}


def reproduce_figure(name: str, out_dir, threads: int = 1, fmt: str = "csv",
                     tol: float = 1e-9, overlay=None, render: bool = True):
    """Run a figure preset and write the dataset, manifest and rendering.

    Returns a dict of written file paths.  The overlay argument (fig4a
    only) points to a user-supplied CSV of externally computed adiabatic
    values with columns kappa_over_omega, duan_adiabatic; they are merged
    into the output as a comparison column.
    """
    if name not in FIGURE_NAMES:
        raise ValueError(f"unknown figure '{name}'; valid names: {', '.join(FIGURE_NAMES)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    extra_files = {}

    if name == "fig2":
        points = [(k, g, True, tol) for g in FIG2_G_VALUES for k in _kappa_grid()]
        rows = _run_points(_curve_worker_two_mode, points, threads)
        columns = _FIG2_COLUMNS
        grid = {"g": list(FIG2_G_VALUES), "kappa": _grid_desc(FIG2_KAPPA_RANGE, CURVE_POINTS)}
    elif name in ("fig3a", "fig3b", "fig3c", "fig3d"):
        rng = FIG3D_KAPPA_RANGE if name == "fig3d" else FIG2_KAPPA_RANGE
        points = [(k, g, False, tol) for g in FIG2_G_VALUES for k in _kappa_grid(rng)]
        rows = _run_points(_curve_worker_two_mode, points, threads)
        columns = PRESET_COLUMNS[name]
        grid = {"g": list(FIG2_G_VALUES), "kappa": _grid_desc(rng, CURVE_POINTS)}
        if name == "fig3b":
            inset = _inset_time_series(tol)
            inset_path = out_dir / "fig3b_inset.csv"
            _write_rows(inset_path, ["time", "E_N_rwa", "E_N_full"], inset, fmt="csv")
            extra_files["inset"] = str(inset_path)
    elif name == "fig4a":
        points = [(k, g, tol, 10.0) for g in FIG2_G_VALUES for k in _kappa_grid()]
        rows = _run_points(_curve_worker_three_mode, points, threads)
        columns = list(_FIG4A_COLUMNS)
        grid = {"g": list(FIG2_G_VALUES), "kappa": _grid_desc(FIG2_KAPPA_RANGE, CURVE_POINTS)}
        if overlay is not None:
            _merge_overlay(rows, overlay)
            columns.insert(columns.index("ts_db_rwa"), "duan_adiabatic_overlay")
    else:  # fig4b / fig4c maps
        nbar = 10.0 if name == "fig4b" else 100.0
        params = ThreeModeParams(g=0.1, kappa=0.1, gamma=_BASE["gamma"], nbar=nbar,
                                 eta=_BASE["eta"], omega_split=0.1)
        kappas = np.geomspace(*FIG4_KAPPA_RANGE, MAP_POINTS)
        gs = np.geomspace(*FIG4_G_RANGE, MAP_POINTS)
        rows = scan_region(kappas, gs, params, rwa=False, tol=tol, threads=threads)
        columns = _FIG4MAP_COLUMNS
        grid = {"kappa": _grid_desc(FIG4_KAPPA_RANGE, MAP_POINTS),
                "g": _grid_desc(FIG4_G_RANGE, MAP_POINTS), "nbar": nbar}

    data_path = out_dir / f"{name}.{fmt}"
    _write_rows(data_path, columns, rows, fmt=fmt)
    runtime = time.time() - started

    manifest = {
        "preset": name,
        "code_version": __version__,
        "parameters": dict(_BASE, omega_split=0.1) if name.startswith("fig4") else dict(_BASE),
        "grid": grid,
        "grid_note": "figure axis ranges are estimates read off the source plots",
        "columns": columns,
        "rows": len(rows),
        "runtime_seconds": runtime,
        "convergence": _convergence_stats(rows),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": {"data": str(data_path), **extra_files},
    }
    manifest_path = out_dir / f"{name}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))
    written = {"data": data_path, "manifest": manifest_path}
    written.update({k: Path(v) for k, v in extra_files.items()})

    if render:
        from .plots import render_figure

        png_path = out_dir / f"{name}.png"
        render_figure(name, rows, png_path,
                      inset_rows=inset if name == "fig3b" else None)
        written["figure"] = png_path
    return written


def _inset_time_series(tol: float):
    """Transient entanglement along the fig3b cut, both models."""
    params = TwoModeParams(g=INSET_CUT["g"], kappa=INSET_CUT["kappa"], **_BASE)
    series = {}
    for label, rwa in (("E_N_rwa", True), ("E_N_full", False)):
        model = build_model(params, rwa=rwa)
        t_end = INSET_PERIODS * model.period
        times, covs = integrate_riccati(model, _thermal_cm(params), dt=model.period / 256,
                                        t_end=t_end, store_stride=64)
        series["time"] = times
        series[label] = [log_negativity(cm, {0}) for cm in covs]
    return [{"time": t, "E_N_rwa": a, "E_N_full": b}
            for t, a, b in zip(series["time"], series["E_N_rwa"], series["E_N_full"])]


def _thermal_cm(params):
    from .gaussian import CovarianceMatrix

    return CovarianceMatrix(thermal_product(params))


def _merge_overlay(rows, overlay_path):
    table = {}
    with open(overlay_path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            table[round(float(rec["kappa_over_omega"]), 12)] = float(rec["duan_adiabatic"])
    for row in rows:
        row["duan_adiabatic_overlay"] = table.get(
            round(row["kappa_over_omega"], 12), float("nan"))


def _grid_desc(rng, n):
    return {"min": rng[0], "max": rng[1], "count": n, "spacing": "log"}


def _convergence_stats(rows):
    flags = [bool(r.get("converged", True)) for r in rows]
    residuals = [r.get("residual") for r in rows
                 if isinstance(r.get("residual"), float) and math.isfinite(r["residual"])]
    periods = [r["periods"] for r in rows if "periods" in r and r["periods"]]
    return {
        "n_points": len(rows),
        "n_converged": sum(flags),
        "max_residual": max(residuals) if residuals else None,
        "periods_max": max(periods) if periods else None,
    }


# ---------------------------------------------------------------------------
# writers


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{value:.12e}"
    return str(value)


def _write_rows(path, columns, rows, fmt="csv"):
    path = Path(path)
    if fmt == "json":
        payload = [{c: row.get(c) for c in columns} for row in rows]
        path.write_text(json.dumps(payload, indent=1, default=_json_default))
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c, "")) for c in columns])


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot serialize {type(value)}")


def write_rows(path, columns, rows, fmt="csv"):
    """Public wrapper used by the CLI for generic sweeps."""
    _write_rows(path, columns, rows, fmt=fmt)


def sweep_columns(config: RunConfig):
    """Column schema of run_sweep for a given configuration."""
    if config.system == "two-mode":
        cols = ["kappa_over_omega", "g_over_omega"]
        cols += [ax.parameter for ax in config.axes
                 if ax.parameter not in ("kappa", "g")]
        cols += ["var_xm_exact", "var_pm_exact", "var_xm_adiabatic", "var_xm_slow",
                 "var_xm_mean", "var_xm_min", "var_xm_max", "var_xc_mean",
                 "var_pc_mean", "var_pm_mean", "squeezing_db_mean",
                 "E_N_mean", "E_N_min", "E_N_max", "converged", "residual",
                 "periods", "error"]
        return cols
    cols = ["kappa_over_omega", "g_over_omega"]
    cols += [ax.parameter for ax in config.axes if ax.parameter not in ("kappa", "g")]
    cols += ["class_label", "class_label_min", "E_N_a", "E_N_b1", "E_N_b2",
             "duan_value", "duan_max", "duan_violation", "converged",
             "residual", "periods", "error"]
    return cols
