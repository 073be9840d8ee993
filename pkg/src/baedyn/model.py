"""Drift, diffusion and measurement matrices for the monitored optomechanical models.

All rates are dimensionless ratios to the mechanical frequency (two-mode
model) or to the mean mechanical frequency (three-mode model); the engine
works in units where that frequency equals 1.  The coupling is modulated at
twice the mechanical frequency, so every drift is periodic with period pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

MODULATION_PERIOD = math.pi
DEFAULT_HOMODYNE_R = 1e-8


@dataclass(frozen=True)
class TwoModeParams:
    """One cavity mode coupled to one mechanical mode.

    g, kappa, gamma are in units of the mechanical frequency; omega_m
    records the physical scale of that unit and does not enter the
    dynamics.  nbar is the mechanical bath occupancy, eta the detection
    efficiency.
    """

    g: float
    kappa: float
    gamma: float
    nbar: float
    eta: float = 1.0
    omega_m: float = 1.0

    def __post_init__(self):
        if self.g <= 0 or self.kappa <= 0 or self.gamma <= 0:
            raise ValueError("g, kappa, gamma must be positive")
        if self.gamma >= 1.0:
            raise ValueError("weak damping required: gamma < 1 (units of omega_m)")
        if self.nbar < 0:
            raise ValueError("nbar must be >= 0")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if self.omega_m <= 0:
            raise ValueError("omega_m must be positive")

    @property
    def n_modes(self) -> int:
        return 2


@dataclass(frozen=True)
class ThreeModeParams:
    """One cavity mode coupled to two mechanical modes.

    omega is the mean mechanical frequency (the unit); omega_split is half
    the frequency difference between the two mechanical modes, in units of
    omega.  Couplings, damping and occupancy are equal for both mechanics.
    """

    g: float
    kappa: float
    gamma: float
    nbar: float
    eta: float = 1.0
    omega_split: float = 0.1
    omega: float = 1.0

    def __post_init__(self):
        if self.g <= 0 or self.kappa <= 0 or self.gamma <= 0:
            raise ValueError("g, kappa, gamma must be positive")
        if self.gamma >= 1.0:
            raise ValueError("weak damping required: gamma < 1 (units of omega)")
        if self.nbar < 0:
            raise ValueError("nbar must be >= 0")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not 0.0 <= self.omega_split < 1.0:
            raise ValueError("omega_split must lie in [0, 1)")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def n_modes(self) -> int:
        return 3


Params = Union[TwoModeParams, ThreeModeParams]


@dataclass(frozen=True)
class MeasurementSpec:
    """General-dyne projector on the cavity output.

    r -> 0 with theta = pi/2 is ideal homodyne detection of the optical
    phase quadrature; the mechanical environment channels are never
    monitored.
    """

    r: float = DEFAULT_HOMODYNE_R
    theta: float = math.pi / 2
    eta_optical: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("r must be positive")
        if not 0.0 <= self.theta < 2 * math.pi:
            raise ValueError("theta must lie in [0, 2*pi)")
        if not 0.0 <= self.eta_optical <= 1.0:
            raise ValueError("eta_optical must lie in [0, 1]")


@dataclass(frozen=True)
class ModelMatrices:
    """One conditional evolution problem: sigma' = A s + s A^T + D - (sB - N)(sB - N)^T."""

    drift: Callable[[float], np.ndarray]
    diffusion: np.ndarray
    meas_b: np.ndarray
    meas_n: np.ndarray
    period: float
    rwa: bool
    n_modes: int


def derive_coupling(g0: float, drive_amp: float, omega_m: float, kappa: float) -> float:
    """Linearized coupling g = g0 |E| / sqrt(omega_m^2 + kappa^2/4)."""
    if g0 <= 0 or drive_amp <= 0 or omega_m <= 0 or kappa <= 0:
        raise ValueError("all arguments must be positive")
    return g0 * drive_amp / math.sqrt(omega_m ** 2 + kappa ** 2 / 4)


def bath_covariance(params: Params) -> np.ndarray:
    """White-noise bath covariance diag[1/2, 1/2, nbar+1/2, ...]."""
    mech = [params.nbar + 0.5] * (2 * (params.n_modes - 1))
    return np.diag([0.5, 0.5] + mech)


def diffusion(params: Params) -> np.ndarray:
    """Diffusion matrix diag[kappa/2, kappa/2, (nbar+1/2) gamma, ...]."""
    mech = [(params.nbar + 0.5) * params.gamma] * (2 * (params.n_modes - 1))
    return np.diag([params.kappa / 2, params.kappa / 2] + mech)


def drift_two_mode(t: float, params: TwoModeParams, rwa: bool = False) -> np.ndarray:
    """Drift matrix in the (X_c, P_c, X_m, P_m) ordering.

    The full model carries the coupling modulation g(1 + cos 2t) and
    g sin 2t; under the rotating-wave approximation only the static g
    survives.
    """
    g, k, gam = params.g, params.kappa, params.gamma
    if rwa:
        c, s = g, 0.0
    else:
        c = g * (1.0 + math.cos(2.0 * t))
        s = g * math.sin(2.0 * t)
    return np.array([
        [-k / 2, 0.0, 0.0, 0.0],
        [0.0, -k / 2, c, s],
        [-s, 0.0, -gam / 2, 0.0],
        [c, 0.0, 0.0, -gam / 2],
    ])


def drift_three_mode(t: float, params: ThreeModeParams, rwa: bool = False) -> np.ndarray:
    """Drift matrix in the (X_c, P_c, X_m1, P_m1, X_m2, P_m2) ordering.

    The two mechanical blocks rotate internally at +/- omega_split with
    opposite signs; both couple identically to the cavity.
    """
    g, k, gam, om = params.g, params.kappa, params.gamma, params.omega_split
    if rwa:
        c, s = g, 0.0
    else:
        c = g * (1.0 + math.cos(2.0 * t))
        s = g * math.sin(2.0 * t)
    return np.array([
        [-k / 2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, -k / 2, c, s, c, s],
        [-s, 0.0, -gam / 2, om, 0.0, 0.0],
        [c, 0.0, -om, -gam / 2, 0.0, 0.0],
        [-s, 0.0, 0.0, 0.0, -gam / 2, -om],
        [c, 0.0, 0.0, 0.0, om, -gam / 2],
    ])


def measurement_matrices(params: Params, spec: MeasurementSpec) -> tuple[np.ndarray, np.ndarray]:
    """Measurement matrices B, N of the conditional evolution.

    B = C Omega (sigma_b + sigma_meas^eta)^{-1/2} and
    N = Omega C sigma_b (sigma_b + sigma_meas^eta)^{-1/2}, with the
    mechanical channels taken in the vanishing-efficiency limit, which
    zeroes their columns exactly.  With the bath coupling
    C = sqrt(kappa) w^{-1} (+) sqrt(gamma) w^{-1} ... both C Omega and
    Omega C reduce to blkdiag(sqrt(kappa) I, sqrt(gamma) I, ...), so only
    the optical 2x2 block survives.

    Returns square 2n x 2n matrices whose unmonitored columns are zero.
    """
    n2 = 2 * params.n_modes
    b = np.zeros((n2, n2))
    nmat = np.zeros((n2, n2))
    eta = spec.eta_optical
    if eta == 0.0:
        return b, nmat
    th, r = spec.theta, spec.r
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    s_meas = 0.5 * rot @ np.diag([r, 1.0 / r]) @ rot.T
    s_meas_eta = s_meas / eta + (1.0 - eta) / (2.0 * eta) * np.eye(2)
    total = 0.5 * np.eye(2) + s_meas_eta
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.T
    b[:2, :2] = math.sqrt(params.kappa) * inv_sqrt
    nmat[:2, :2] = math.sqrt(params.kappa) * 0.5 * inv_sqrt
    return b, nmat


def build_model(params: Params, spec: Optional[MeasurementSpec] = None,
                rwa: bool = False) -> ModelMatrices:
    """Assemble the drift/diffusion/measurement bundle for a parameter set.

    If no measurement spec is given, ideal homodyne of the phase quadrature
    at the params' detection efficiency is used.
    """
    if spec is None:
        spec = MeasurementSpec(eta_optical=params.eta)
    b, nmat = measurement_matrices(params, spec)
    if isinstance(params, TwoModeParams):
        def drift(t: float, _p=params, _rwa=rwa) -> np.ndarray:
            return drift_two_mode(t, _p, _rwa)
    else:
        def drift(t: float, _p=params, _rwa=rwa) -> np.ndarray:
            return drift_three_mode(t, _p, _rwa)
    d = diffusion(params)
    return ModelMatrices(drift=drift, diffusion=d, meas_b=b, meas_n=nmat,
                         period=MODULATION_PERIOD, rwa=rwa, n_modes=params.n_modes)


def thermal_product(params: Params) -> np.ndarray:
    """Vacuum (cavity) x thermal (mechanics) covariance, the default initial state."""
    mech = [params.nbar + 0.5] * (2 * (params.n_modes - 1))
    return np.diag([0.5, 0.5] + mech)
