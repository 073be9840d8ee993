"""Command-line interface: steady states, sweeps, trajectories, perturbation checks, maps."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import steady_state_rwa
from .classify import classify_three_mode, scan_region
from .config import ConfigError, RunConfig, load_config, parse_config
from .errors import ConvergenceError, DivergenceError, NumericalError, UnphysicalStateError
from .gaussian import log_negativity, purity, squeezing_db
from .model import build_model, thermal_product
from .perturbation import (fourier_covariance, pm_correction_closed_form,
                           xm_correction_closed_form)
from .riccati import periodic_steady_state, sample_trajectory
from .sweep import (FIGURE_NAMES, format_value, reproduce_figure, run_sweep,
                    sweep_columns, write_rows)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baedyn",
        description="Conditional Gaussian dynamics of two-tone backaction-evading "
                    "optomechanical measurements.")
    parser.add_argument("--version", action="version", version=f"baedyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--config", type=Path, default=None,
                       help="configuration file (defaults apply when omitted)")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        if seed:
            p.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")

    p = sub.add_parser("steady-state", help="steady state at the configured point")
    common(p)
    p = sub.add_parser("sweep", help="sweep the configured axes")
    common(p)
    p = sub.add_parser("trajectory", help="stochastic first-moment trajectory")
    common(p, seed=True)
    p.add_argument("--t-end", type=float, default=200.0, help="duration (units of 1/omega_m)")
    p = sub.add_parser("perturb", help="second-order counter-rotating corrections")
    common(p)
    p = sub.add_parser("classify", help="three-mode separability at a point or grid")
    common(p)
    p = sub.add_parser("reproduce", help="run a figure preset")
    p.add_argument("figure", choices=FIGURE_NAMES)
    common(p)
    p.add_argument("--overlay", type=Path, default=None,
                   help="fig4a only: CSV with externally computed adiabatic values")
    p.add_argument("--no-render", action="store_true", help="skip the PNG rendering")
    return parser


def _load(args) -> RunConfig:
    if args.config is None:
        cfg = parse_config("")
    else:
        cfg = load_config(args.config)
    if args.out is not None:
        cfg = _replace(cfg, out_dir=str(args.out))
    if getattr(args, "format", None):
        cfg = _replace(cfg, format=args.format)
    if getattr(args, "seed", None) is not None:
        cfg = _replace(cfg, seed=args.seed)
    return cfg


def _replace(cfg: RunConfig, **kw) -> RunConfig:
    from dataclasses import replace

    return replace(cfg, **kw)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_steady_state(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    state = periodic_steady_state(build_model(params, spec=cfg.measurement(), rwa=cfg.rwa),
                                  dt=cfg.dt, tol=cfg.tol, max_periods=cfg.max_periods,
                                  samples_per_period=cfg.samples_per_period)
    mean = state.mean_cm
    payload = {
        "system": cfg.system,
        "model": cfg.model,
        "parameters": _params_dict(cfg),
        "mean_covariance": mean.data.tolist(),
        "per_element_min": state.per_element_stats["min"].tolist(),
        "per_element_max": state.per_element_stats["max"].tolist(),
        "purity": purity(mean),
        "converged": state.converged,
        "residual": state.residual,
        "periods": state.periods_used,
    }
    if cfg.system == "two-mode":
        payload["var_xm_mean"] = mean.variance(2)
        payload["squeezing_db"] = squeezing_db(mean.variance(2))
        payload["E_N_cavity_mechanics"] = log_negativity(mean, {0})
        if cfg.rwa:
            payload["var_xm_exact"] = steady_state_rwa(params).cm.variance(2)
    else:
        report = classify_three_mode(mean, params)
        payload["class_label"] = report.class_label
        payload["E_N"] = list(report.bipartition_negativity)
        payload["duan_value"] = report.duan_value
    out = _out_dir(cfg) / "steady_state.json"
    out.write_text(json.dumps(payload, indent=2))
    print(f"wrote {out}")
    _print_summary(payload)
    return 0


def _print_summary(payload):
    for key in ("var_xm_mean", "squeezing_db", "E_N_cavity_mechanics",
                "class_label", "duan_value", "residual"):
        if key in payload:
            print(f"  {key} = {payload[key]}")


def _params_dict(cfg: RunConfig):
    keys = ("g", "kappa", "gamma", "nbar", "eta")
    d = {k: getattr(cfg, k) for k in keys}
    if cfg.system == "three-mode":
        d["omega_split"] = cfg.omega_split
    d.update({"r": cfg.r, "theta": cfg.theta})
    return d


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    if not cfg.axes:
        print("error: no [sweep] section in the configuration", file=sys.stderr)
        return 2
    rows = run_sweep(cfg, threads=args.threads)
    out = _out_dir(cfg) / f"sweep.{cfg.format}"
    write_rows(out, sweep_columns(cfg), rows, fmt=cfg.format)
    n_fail = sum(1 for r in rows if not r.get("converged", False))
    print(f"wrote {out} ({len(rows)} rows, {n_fail} flagged)")
    return 0


def _cmd_trajectory(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    model = build_model(params, spec=cfg.measurement(), rwa=cfg.rwa)
    state = periodic_steady_state(model, dt=cfg.dt, tol=cfg.tol,
                                  max_periods=cfg.max_periods)
    dt = model.period / 256
    record = sample_trajectory(model, state, np.zeros(2 * params.n_modes),
                               seed=cfg.seed, dt=dt, t_end=args.t_end,
                               emit_current=cfg.system == "two-mode")
    columns = ["time"] + [f"mean_{q}" for q in _quad_names(params.n_modes)]
    rows = []
    for i, t in enumerate(record.times):
        row = {"time": t}
        row.update({f"mean_{q}": record.means[i, j]
                    for j, q in enumerate(_quad_names(params.n_modes))})
        rows.append(row)
    out = _out_dir(cfg) / f"trajectory.{cfg.format}"
    write_rows(out, columns, rows, fmt=cfg.format)
    cur = _out_dir(cfg) / "trajectory_currents.csv"
    cur_cols = ["step", "dW_xc", "dW_pc"] + (
        ["diagnostic_current"] if record.diagnostic_current is not None else [])
    cur_rows = []
    for i in range(record.currents.shape[0]):
        row = {"step": i, "dW_xc": record.currents[i, 0], "dW_pc": record.currents[i, 1]}
        if record.diagnostic_current is not None:
            row["diagnostic_current"] = record.diagnostic_current[i]
        cur_rows.append(row)
    write_rows(cur, cur_cols, cur_rows, fmt="csv")
    print(f"wrote {out} and {cur} (seed {record.seed})")
    return 0


def _quad_names(n_modes):
    if n_modes == 2:
        return ("xc", "pc", "xm", "pm")
    return ("xc", "pc", "xm1", "pm1", "xm2", "pm2")


def _cmd_perturb(args) -> int:
    cfg = _load(args)
    if cfg.system != "two-mode":
        print("error: perturb applies to the two-mode system", file=sys.stderr)
        return 2
    params = cfg.params()
    fc = fourier_covariance(params)
    payload = {
        "parameters": _params_dict(cfg),
        "sigma0": fc.sigma0.data.tolist(),
        "sigma1_real": fc.sigma1.real.tolist(),
        "sigma1_imag": fc.sigma1.imag.tolist(),
        "correction0": fc.correction0.tolist(),
        "xm_correction_closed_form": xm_correction_closed_form(params),
        "pm_correction_closed_form": pm_correction_closed_form(params),
    }
    out = _out_dir(cfg) / "perturbation.json"
    out.write_text(json.dumps(payload, indent=2))
    print(f"wrote {out}")
    print(f"  correction (X_m, X_m) = {fc.correction0[2, 2]:.6e}"
          f"  closed form = {payload['xm_correction_closed_form']:.6e}")
    print(f"  correction (P_m, P_m) = {fc.correction0[3, 3]:.6e}"
          f"  closed form = {payload['pm_correction_closed_form']:.6e}")
    return 0


def _cmd_classify(args) -> int:
    cfg = _load(args)
    if cfg.system != "three-mode":
        print("error: classify applies to the three-mode system", file=sys.stderr)
        return 2
    if cfg.axes:
        axes = {ax.parameter: ax for ax in cfg.axes}
        kappas = axes["kappa"].values() if "kappa" in axes else [cfg.kappa]
        gs = axes["g"].values() if "g" in axes else [cfg.g]
        rows = scan_region(kappas, gs, cfg.params(), rwa=cfg.rwa, dt=cfg.dt,
                           tol=cfg.tol, max_periods=cfg.max_periods,
                           threads=args.threads)
        from .sweep import _FIG4MAP_COLUMNS

        out = _out_dir(cfg) / f"classification.{cfg.format}"
        write_rows(out, _FIG4MAP_COLUMNS, rows, fmt=cfg.format)
        print(f"wrote {out} ({len(rows)} rows)")
        return 0
    params = cfg.params()
    state = periodic_steady_state(build_model(params, spec=cfg.measurement(), rwa=cfg.rwa),
                                  dt=cfg.dt, tol=cfg.tol, max_periods=cfg.max_periods)
    report = classify_three_mode(state.mean_cm, params)
    print(f"class: {report.class_label}")
    print(f"E_N (a|b1b2, b1|ab2, b2|ab1): "
          + ", ".join(format_value(v) for v in report.bipartition_negativity))
    print(f"duan: {report.duan_value:.6f} (violation: {report.duan_value < 1.0})")
    return 0


def _cmd_reproduce(args) -> int:
    cfg = _load(args)
    out = args.out if args.out is not None else Path(cfg.out_dir)
    written = reproduce_figure(args.figure, out, threads=args.threads,
                               fmt=args.format or "csv", overlay=args.overlay,
                               render=not args.no_render)
    for kind, path in written.items():
        print(f"wrote {kind}: {path}")
    return 0


_COMMANDS = {
    "steady-state": _cmd_steady_state,
    "sweep": _cmd_sweep,
    "trajectory": _cmd_trajectory,
    "perturb": _cmd_perturb,
    "classify": _cmd_classify,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, DivergenceError, NumericalError, UnphysicalStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
