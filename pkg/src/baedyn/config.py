"""Run configuration: flat key-value files with [system] [measurement] [sweep] [integrator] [output] sections."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from typing import Optional

from .model import MeasurementSpec, ThreeModeParams, TwoModeParams

_SYSTEMS = ("two-mode", "three-mode")
_MODELS = ("rwa", "full")
_SPACINGS = ("linear", "log")
_FORMATS = ("csv", "json")

_KNOWN_KEYS = {
    "system": {"kind", "model", "g", "kappa", "gamma", "nbar", "eta", "omega_split"},
    "measurement": {"r", "theta"},
    "sweep": {"parameter", "min", "max", "count", "spacing",
              "parameter2", "min2", "max2", "count2", "spacing2"},
    "integrator": {"dt", "tol", "max_periods", "samples_per_period"},
    "output": {"dir", "format", "figures"},
}
_SWEEPABLE = ("kappa", "g", "gamma", "nbar", "eta", "omega_split")


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    lo: float
    hi: float
    count: int
    spacing: str = "log"

    def values(self):
        import numpy as np

        if self.count == 1:
            return np.array([self.lo])
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class RunConfig:
    """Validated run description with all defaults filled."""

    system: str = "two-mode"
    model: str = "rwa"
    g: float = 0.05
    kappa: float = 0.1
    gamma: float = 1e-4
    nbar: float = 10.0
    eta: float = 1.0
    omega_split: float = 0.1
    r: float = 1e-8
    theta: float = math.pi / 2
    axes: tuple = ()
    dt: Optional[float] = None
    tol: float = 1e-9
    max_periods: int = 20000
    samples_per_period: int = 64
    out_dir: str = "out"
    format: str = "csv"
    figures: bool = True
    seed: int = 0

    def params(self):
        if self.system == "two-mode":
            return TwoModeParams(g=self.g, kappa=self.kappa, gamma=self.gamma,
                                 nbar=self.nbar, eta=self.eta)
        return ThreeModeParams(g=self.g, kappa=self.kappa, gamma=self.gamma,
                               nbar=self.nbar, eta=self.eta,
                               omega_split=self.omega_split)

    def measurement(self) -> MeasurementSpec:
        return MeasurementSpec(r=self.r, theta=self.theta, eta_optical=self.eta)

    @property
    def rwa(self) -> bool:
        return self.model == "rwa"


class ConfigError(ValueError):
    """Malformed or invalid configuration; message names the offending key."""


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    The empty document yields the all-defaults two-mode demo point.
    Unknown sections or keys are rejected; every validation error names
    the offending key.
    """
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")

    def get(section, key, default, conv=float):
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            try:
                return conv(raw)
            except ValueError as exc:
                raise ConfigError(f"invalid value for '{key}': {raw!r}") from exc
        return default

    def get_bool(section, key, default):
        if cp.has_option(section, key):
            try:
                return cp.getboolean(section, key)
            except ValueError as exc:
                raise ConfigError(f"invalid boolean for '{key}'") from exc
        return default

    system = get("system", "kind", "two-mode", str)
    if system not in _SYSTEMS:
        raise ConfigError(f"invalid value for 'kind': {system!r} (use two-mode|three-mode)")
    model = get("system", "model", "rwa", str)
    if model not in _MODELS:
        raise ConfigError(f"invalid value for 'model': {model!r} (use rwa|full)")

    cfg = dict(
        system=system,
        model=model,
        g=get("system", "g", 0.05),
        kappa=get("system", "kappa", 0.1),
        gamma=get("system", "gamma", 1e-4),
        nbar=get("system", "nbar", 10.0),
        eta=get("system", "eta", 1.0),
        omega_split=get("system", "omega_split", 0.1),
        r=get("measurement", "r", 1e-8),
        theta=get("measurement", "theta", math.pi / 2),
        dt=get("integrator", "dt", None),
        tol=get("integrator", "tol", 1e-9),
        max_periods=get("integrator", "max_periods", 20000, int),
        samples_per_period=get("integrator", "samples_per_period", 64, int),
        out_dir=get("output", "dir", "out", str),
        format=get("output", "format", "csv", str),
        figures=get_bool("output", "figures", True),
    )

    axes = []
    for suffix in ("", "2"):
        pname = get("sweep", f"parameter{suffix}", None, str)
        if pname is None:
            continue
        if pname not in _SWEEPABLE:
            raise ConfigError(f"invalid value for 'parameter{suffix}': {pname!r}")
        axis = SweepAxis(
            parameter=pname,
            lo=get("sweep", f"min{suffix}", None),
            hi=get("sweep", f"max{suffix}", None),
            count=get("sweep", f"count{suffix}", 1, int),
            spacing=get("sweep", f"spacing{suffix}", "log", str),
        )
        if axis.lo is None or axis.hi is None:
            raise ConfigError(f"sweep axis '{pname}' needs min{suffix} and max{suffix}")
        if axis.spacing not in _SPACINGS:
            raise ConfigError(f"invalid value for 'spacing{suffix}': {axis.spacing!r}")
        if axis.count < 1:
            raise ConfigError(f"invalid value for 'count{suffix}': must be >= 1")
        if axis.parameter not in ("eta",) and (axis.lo <= 0 or axis.hi <= 0):
            raise ConfigError(f"sweep bounds for '{pname}' must be positive")
        axes.append(axis)
    cfg["axes"] = tuple(axes)

    _validate_physical(cfg)
    return RunConfig(**cfg)


def _validate_physical(cfg: dict) -> None:
    for key in ("g", "kappa", "gamma"):
        if cfg[key] <= 0:
            raise ConfigError(f"invalid value for '{key}': must be positive")
    if cfg["gamma"] >= 1.0:
        raise ConfigError("invalid value for 'gamma': must be < 1 (weak damping)")
    if cfg["nbar"] < 0:
        raise ConfigError("invalid value for 'nbar': must be >= 0")
    if not 0.0 <= cfg["eta"] <= 1.0:
        raise ConfigError("invalid value for 'eta': must lie in [0, 1]")
    if not 0.0 <= cfg["omega_split"] < 1.0:
        raise ConfigError("invalid value for 'omega_split': must lie in [0, 1)")
    if cfg["r"] <= 0:
        raise ConfigError("invalid value for 'r': must be positive")
    if not 0.0 <= cfg["theta"] < 2 * math.pi:
        raise ConfigError("invalid value for 'theta': must lie in [0, 2*pi)")
    if cfg["tol"] <= 0:
        raise ConfigError("invalid value for 'tol': must be positive")
    if cfg["dt"] is not None and cfg["dt"] <= 0:
        raise ConfigError("invalid value for 'dt': must be positive")
    if cfg["max_periods"] < 1:
        raise ConfigError("invalid value for 'max_periods': must be >= 1")
    if cfg["samples_per_period"] < 1:
        raise ConfigError("invalid value for 'samples_per_period': must be >= 1")
    if cfg["format"] not in _FORMATS:
        raise ConfigError(f"invalid value for 'format': {cfg['format']!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Render a config back to the file format; parse(serialize(c)) == c."""
    lines = ["[system]",
             f"kind = {cfg.system}",
             f"model = {cfg.model}",
             f"g = {cfg.g!r}",
             f"kappa = {cfg.kappa!r}",
             f"gamma = {cfg.gamma!r}",
             f"nbar = {cfg.nbar!r}",
             f"eta = {cfg.eta!r}",
             f"omega_split = {cfg.omega_split!r}",
             "",
             "[measurement]",
             f"r = {cfg.r!r}",
             f"theta = {cfg.theta!r}",
             ""]
    if cfg.axes:
        lines.append("[sweep]")
        for axis, suffix in zip(cfg.axes, ("", "2")):
            lines += [f"parameter{suffix} = {axis.parameter}",
                      f"min{suffix} = {axis.lo!r}",
                      f"max{suffix} = {axis.hi!r}",
                      f"count{suffix} = {axis.count}",
                      f"spacing{suffix} = {axis.spacing}"]
        lines.append("")
    lines += ["[integrator]"]
    if cfg.dt is not None:
        lines.append(f"dt = {cfg.dt!r}")
    lines += [f"tol = {cfg.tol!r}",
              f"max_periods = {cfg.max_periods}",
              f"samples_per_period = {cfg.samples_per_period}",
              "",
              "[output]",
              f"dir = {cfg.out_dir}",
              f"format = {cfg.format}",
              f"figures = {'true' if cfg.figures else 'false'}",
              ""]
    return "\n".join(lines)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
