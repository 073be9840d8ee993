"""Matplotlib renderings of the figure presets, written next to the CSV data."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_CURVE_COLORS = {0.01: "tab:red", 0.05: "gold", 0.3: "tab:cyan"}
_CLASS_ORDER = ["ppt-wrt-all", "two-bipartition-entangled", "one-mode-biseparable(a)",
                "one-mode-biseparable(b1)", "one-mode-biseparable(b2)",
                "fully-inseparable", "failed"]


def load_rows(path):
    """Read a preset CSV back into a list of typed rows."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            row = {}
            for key, val in rec.items():
                if val in ("true", "false"):
                    row[key] = val == "true"
                else:
                    try:
                        row[key] = float(val)
                    except ValueError:
                        row[key] = val
            rows.append(row)
    return rows


def render_figure(name: str, rows, out_path, inset_rows=None, dpi=150):
    """Dispatch a preset's rows to its renderer and save a PNG."""
    if isinstance(rows, (str, Path)):
        rows = load_rows(rows)
    if name == "fig2":
        fig = _render_fig2(rows)
    elif name in ("fig3a", "fig3c"):
        fig = _render_band_curves(
            rows,
            mean_key="var_xm_full_mean" if name == "fig3a" else "var_xc_full_mean",
            lo_key="var_xm_full_min" if name == "fig3a" else "var_xc_full_min",
            hi_key="var_xm_full_max" if name == "fig3a" else "var_xc_full_max",
            ref_key="var_xm_exact" if name == "fig3a" else "var_xc_rwa",
            to_db=True,
            ylabel="mechanical squeezing (dB)" if name == "fig3a" else "cavity squeezing (dB)",
            extra_ref="var_xm_adiabatic" if name == "fig3a" else None,
        )
    elif name in ("fig3b", "fig3d"):
        fig = _render_band_curves(
            rows, mean_key="E_N_full_mean", lo_key="E_N_full_min", hi_key="E_N_full_max",
            ref_key="E_N_rwa", to_db=False, ylabel="logarithmic negativity",
            inset_rows=inset_rows)
    elif name == "fig4a":
        fig = _render_band_curves(
            rows, mean_key="ts_db_full_mean", lo_key="duan_full_min", hi_key="duan_full_max",
            ref_key="ts_db_rwa", to_db=False, ylabel="two-mode squeezing (dB)",
            band_duan_db=True)
    elif name in ("fig4b", "fig4c"):
        fig = _render_class_map(rows)
    else:
        raise ValueError(f"no renderer for '{name}'")
    fig.savefig(out_path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return Path(out_path)


def _by_curve(rows):
    gs = sorted({row["g_over_omega"] for row in rows})
    for g in gs:
        sel = sorted((r for r in rows if r["g_over_omega"] == g),
                     key=lambda r: r["kappa_over_omega"])
        yield g, sel


def _db(values):
    vals = np.asarray(values, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return -10.0 * np.log10(2.0 * vals)


def _duan_db(values):
    vals = np.asarray(values, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return -10.0 * np.log10(vals)


def _render_fig2(rows):
    fig, ax = plt.subplots(figsize=(6, 4))
    for g, sel in _by_curve(rows):
        kap = [r["kappa_over_omega"] for r in sel]
        color = _CURVE_COLORS.get(g, None)
        ax.semilogx(kap, _db([r["var_xm_exact"] for r in sel]), color=color,
                    label=f"g = {g}")
        ax.semilogx(kap, _db([r["var_xm_adiabatic"] for r in sel]),
                    color="black", lw=0.9)
        ax.semilogx(kap, _db([r["var_xm_slow"] for r in sel]),
                    color="black", lw=0.9, ls="--")
    ax.set_xlabel(r"$\kappa/\omega_m$")
    ax.set_ylabel("mechanical squeezing (dB)")
    ax.set_ylim(bottom=-1)
    ax.legend(frameon=False)
    return fig


def _render_band_curves(rows, mean_key, lo_key, hi_key, ref_key, to_db, ylabel,
                        extra_ref=None, inset_rows=None, band_duan_db=False):
    fig, ax = plt.subplots(figsize=(6, 4))
    conv = _db if to_db else (lambda v: np.asarray(v, dtype=float))
    for g, sel in _by_curve(rows):
        kap = np.array([r["kappa_over_omega"] for r in sel])
        color = _CURVE_COLORS.get(g, None)
        mean = np.array([r.get(mean_key, np.nan) for r in sel], dtype=float)
        lo = conv([r.get(lo_key, np.nan) for r in sel])
        hi = conv([r.get(hi_key, np.nan) for r in sel])
        if band_duan_db:
            lo, hi = _duan_db([r.get(hi_key, np.nan) for r in sel]), _duan_db(
                [r.get(lo_key, np.nan) for r in sel])
            mean_plot = mean
        else:
            mean_plot = conv([r.get(mean_key, np.nan) for r in sel]) if to_db else mean
        band_lo, band_hi = np.minimum(lo, hi), np.maximum(lo, hi)
        ax.fill_between(kap, band_lo, band_hi, alpha=0.3, color=color, lw=0)
        ax.semilogx(kap, mean_plot, color=color, ls=":", label=f"g = {g}")
        ref = conv([r.get(ref_key, np.nan) for r in sel]) if to_db else np.array(
            [r.get(ref_key, np.nan) for r in sel], dtype=float)
        ax.semilogx(kap, ref, color=color, ls="--", lw=1.0)
        if extra_ref:
            ax.semilogx(kap, conv([r.get(extra_ref, np.nan) for r in sel]),
                        color="black", lw=0.9)
    ax.set_xlabel(r"$\kappa/\omega$")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    if inset_rows:
        axi = fig.add_axes([0.62, 0.55, 0.27, 0.3])
        t = [r["time"] for r in inset_rows]
        axi.plot(t, [r["E_N_rwa"] for r in inset_rows], lw=0.8, label="rwa")
        axi.plot(t, [r["E_N_full"] for r in inset_rows], lw=0.8, label="full")
        axi.set_xlabel(r"$\omega_m t$", fontsize=7)
        axi.set_ylabel(r"$E_N$", fontsize=7)
        axi.tick_params(labelsize=6)
        axi.legend(fontsize=6, frameon=False)
    return fig


def _render_class_map(rows):
    kappas = sorted({r["kappa_over_omega"] for r in rows})
    gs = sorted({r["g_over_omega"] for r in rows})
    ki = {v: i for i, v in enumerate(kappas)}
    gi = {v: i for i, v in enumerate(gs)}
    grid = np.full((len(gs), len(kappas)), np.nan)
    duan_mask = np.zeros_like(grid, dtype=bool)
    for r in rows:
        label = r.get("class_label", "failed")
        idx = _CLASS_ORDER.index(label) if label in _CLASS_ORDER else len(_CLASS_ORDER) - 1
        grid[gi[r["g_over_omega"]], ki[r["kappa_over_omega"]]] = idx
        duan_mask[gi[r["g_over_omega"]], ki[r["kappa_over_omega"]]] = bool(
            r.get("duan_violation", False))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.pcolormesh(kappas, gs, grid, cmap="viridis",
                         vmin=0, vmax=len(_CLASS_ORDER) - 1, shading="nearest")
    # hatch the region with mechanical two-mode squeezing
    ax.contourf(kappas, gs, duan_mask.astype(float), levels=[0.5, 1.5],
                colors="none", hatches=["//"])
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\kappa/\omega$")
    ax.set_ylabel(r"$g/\omega$")
    cbar = fig.colorbar(mesh, ax=ax, ticks=range(len(_CLASS_ORDER)))
    cbar.ax.set_yticklabels(_CLASS_ORDER, fontsize=7)
    return fig
