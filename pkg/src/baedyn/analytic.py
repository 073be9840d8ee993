"""Closed-form steady state of the rotating-wave model and its limiting regimes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gaussian import CovarianceMatrix
from .model import TwoModeParams


@dataclass(frozen=True)
class RwaSteadyState:
    """Conditional steady state of the QND model with homodyne monitoring."""

    cm: CovarianceMatrix
    zeta: float
    cooperativity: float


def cooperativity(params: TwoModeParams) -> float:
    """C = 4 g^2 / (kappa gamma)."""
    return 4.0 * params.g ** 2 / (params.kappa * params.gamma)


def steady_state_rwa(params: TwoModeParams) -> RwaSteadyState:
    """Exact conditional steady-state covariance of the QND model.

    The conditional variances suffer catastrophic cancellation when the
    measurement term is much smaller than gamma*kappa, so the returned
    entries use algebraically equivalent forms with the difference
    rationalized away:

        zeta + gamma^2 - gamma*s  ==  gamma*kappa*w / (zeta + gamma^2 + gamma*s)
        s - (gamma + kappa)       ==  2*gamma*kappa*w / ((zeta + gamma*kappa)(s + gamma + kappa))

    with w = 16 g^2 eta (1 + 2 nbar), zeta = sqrt(gamma kappa (w + gamma kappa))
    and s = sqrt(gamma^2 + kappa^2 + 2 zeta).  These forms are exact and
    regular at eta = 0, where they reduce to the unconditional values
    without any branching.
    """
    g, k, gam, nbar, eta = params.g, params.kappa, params.gamma, params.nbar, params.eta
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    occ = 1.0 + 2.0 * nbar
    w = 16.0 * g * g * eta * occ
    zeta = math.sqrt(gam * k) * math.sqrt(w + gam * k)
    s = math.sqrt(gam * gam + k * k + 2.0 * zeta)
    den = zeta + gam * gam + gam * s
    var_xm = gam * occ * s / den
    cov_pcxm = 2.0 * g * gam * occ / den
    var_pc = 0.5 + 8.0 * g * g * gam * occ / ((zeta + gam * k) * (s + gam + k))
    var_pm = nbar + 0.5 + 2.0 * g * g / (gam * (gam + k))
    cov_xcpm = g / (gam + k)
    cm = np.zeros((4, 4))
    cm[0, 0] = 0.5
    cm[1, 1] = var_pc
    cm[2, 2] = var_xm
    cm[3, 3] = var_pm
    cm[0, 3] = cm[3, 0] = cov_xcpm
    cm[1, 2] = cm[2, 1] = cov_pcxm
    return RwaSteadyState(cm=CovarianceMatrix(cm), zeta=zeta,
                          cooperativity=cooperativity(params))


def adiabatic_variance(params: TwoModeParams) -> float:
    """Fast-cavity limit of the conditional X_m variance.

    (sqrt(1 + 4 eta C (1+2 nbar)) - 1) / (4 eta C); valid for kappa well
    above the mechanical frequency.
    """
    if params.eta <= 0:
        raise ValueError("adiabatic variance needs eta > 0")
    c = cooperativity(params)
    x = 4.0 * params.eta * c
    return (math.sqrt(1.0 + x * (1.0 + 2.0 * params.nbar)) - 1.0) / x


def slow_cavity_variance(params: TwoModeParams) -> float:
    """Leading large-cooperativity term in the slow-cavity regime.

    (1+2 nbar)^{3/4} / (C eta)^{1/4} * sqrt(gamma/kappa); intended for
    C >> 1 and kappa well below the mechanical frequency.
    """
    if params.eta <= 0:
        raise ValueError("slow-cavity variance needs eta > 0")
    c = cooperativity(params)
    return ((1.0 + 2.0 * params.nbar) ** 0.75 / (c * params.eta) ** 0.25
            * math.sqrt(params.gamma / params.kappa))


def kappa_opt(params: TwoModeParams) -> float:
    """Sideband parameter at which the two asymptotes intersect.

    4 g^{2/3} [eta gamma (1+2 nbar)]^{1/3}; an approximate condition for
    optimal squeezing.
    """
    if params.eta <= 0:
        raise ValueError("kappa_opt needs eta > 0")
    return 4.0 * params.g ** (2.0 / 3.0) * (
        params.eta * params.gamma * (1.0 + 2.0 * params.nbar)) ** (1.0 / 3.0)
