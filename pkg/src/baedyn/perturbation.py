"""Second-order perturbation theory in the counter-rotating coupling.

The periodic covariance is expanded in Fourier harmonics of the coupling
modulation, sigma(t) = sum_n sigma_n exp(i n 2 t), keeping only n = 0, +-1.
sigma_1 obeys a linear equation sourced by the modulated part of the drift
and is obtained from a dense 16x16 complex solve; the stationary part then
acquires a second-order correction assembled directly from sigma_{+-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .gaussian import CovarianceMatrix
from .model import ModelMatrices, TwoModeParams, build_model

_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class FourierCovariance:
    """Stationary part, first harmonic, and second-order stationary correction."""

    sigma0: CovarianceMatrix
    sigma1: np.ndarray
    correction0: np.ndarray

    def reconstruct(self, t: float) -> np.ndarray:
        """sigma(t) = sigma0 + correction0 + 2 Re[exp(2 i t) sigma1]."""
        osc = 2.0 * np.real(np.exp(2j * t) * self.sigma1)
        return self.sigma0.data + self.correction0 + osc


def fourier_drift_components(params: TwoModeParams) -> tuple[np.ndarray, np.ndarray]:
    """Harmonics of the drift: A(t) = A0 + A1 e^{2it} + conj(A1) e^{-2it}.

    A0 is the rotating-wave drift; A1 carries the coupling modulation,
    entries (P_c,X_m) = g/2, (P_c,P_m) = -ig/2, (X_m,X_c) = ig/2,
    (P_m,X_c) = g/2.
    """
    from .model import drift_two_mode

    a0 = drift_two_mode(0.0, params, rwa=True)
    g = params.g
    a1 = np.zeros((4, 4), dtype=complex)
    a1[1, 2] = 0.5 * g
    a1[1, 3] = -0.5j * g
    a1[2, 0] = 0.5j * g
    a1[3, 0] = 0.5 * g
    return a0, a1


def solve_sigma1(sigma0: CovarianceMatrix, model: ModelMatrices) -> np.ndarray:
    """First Fourier harmonic of the periodic steady-state covariance.

    Solves, by vectorization into one dense complex linear system,

        0 = -i w_mod sigma1 + A0 sigma1 + sigma1 A0^T + A1 sigma0 + sigma0 A1^T
            - sigma0 B B^T sigma1 - sigma1 B B^T sigma0 + sigma1 B N^T + N B^T sigma1

    with w_mod = 2 pi / period the modulation frequency.  All sigma1 terms
    collapse onto the closed-loop drift At = A0 - (sigma0 B - N) B^T, so the
    system matrix is (A t - i w_mod/2) (x) I + I (x) (same).  N is symmetric
    for every model built here, so B N^T coincides with B N.
    """
    a0, a1 = _model_harmonics(model)
    b, nmat = model.meas_b, model.meas_n
    s0 = sigma0.data
    at = a0 - (s0 @ b - nmat) @ b.T
    w_mod = 2.0 * math.pi / model.period
    dim = s0.shape[0]
    eye = np.eye(dim)
    sys = (np.kron(at - 0.5j * w_mod * eye, eye) + np.kron(eye, at - 0.5j * w_mod * eye))
    rhs = -(a1 @ s0 + s0 @ a1.T).reshape(-1)
    cond = np.linalg.cond(sys)
    if not np.isfinite(cond) or cond > 1e14:
        raise NumericalError(f"sigma1 system ill-conditioned (cond {cond:.2e})")
    s1 = np.linalg.solve(sys, rhs).reshape(dim, dim)
    # sigma(t) real symmetric for all t forces sigma1 complex-symmetric
    asym = np.abs(s1 - s1.T).max()
    if asym > 1e-10 * max(np.abs(s1).max(), 1.0):
        raise NumericalError(f"sigma1 lost symmetry ({asym:.2e})")
    return 0.5 * (s1 + s1.T)


def second_order_correction(sigma0: CovarianceMatrix, sigma1: np.ndarray,
                            model: ModelMatrices) -> np.ndarray:
    """Stationary second-order correction assembled from the first harmonic.

    A_{-1} sigma1 + sigma1 A_{-1}^T + A1 sigma_{-1} + sigma_{-1} A1^T
    - sigma_{-1} B B^T sigma1 - sigma1 B B^T sigma_{-1},
    with sigma_{-1} = sigma1^dagger.
    """
    _, a1 = _model_harmonics(model)
    am1 = a1.conj()
    sm1 = sigma1.conj().T
    b = model.meas_b
    bbt = b @ b.T
    corr = (am1 @ sigma1 + sigma1 @ am1.T + a1 @ sm1 + sm1 @ a1.T
            - sm1 @ bbt @ sigma1 - sigma1 @ bbt @ sm1)
    imag = np.abs(corr.imag).max()
    if imag > _IMAG_TOL:
        raise NumericalError(f"second-order correction has imaginary residue {imag:.2e}")
    out = corr.real
    return 0.5 * (out + out.T)


def fourier_covariance(params: TwoModeParams, model: ModelMatrices | None = None,
                       sigma0: CovarianceMatrix | None = None) -> FourierCovariance:
    """Assemble sigma0, sigma1 and the stationary correction for a parameter set."""
    from .analytic import steady_state_rwa

    if model is None:
        model = build_model(params, rwa=False)
    if sigma0 is None:
        sigma0 = steady_state_rwa(params).cm
    s1 = solve_sigma1(sigma0, model)
    corr = second_order_correction(sigma0, s1, model)
    return FourierCovariance(sigma0=sigma0, sigma1=s1, correction0=corr)


def cavity_susceptibility(omega: float, kappa: float) -> complex:
    """chi_c(omega) = 1 / (kappa/2 - i omega)."""
    return 1.0 / (kappa / 2.0 - 1j * omega)


def xm_correction_closed_form(params: TwoModeParams) -> float:
    """Backaction-dominated closed form for the squeezed-quadrature correction.

    (kappa/2) |chi_c(2)|^2 g^2 / 2 in mechanical-frequency units; independent
    of the detection efficiency.
    """
    chi2 = abs(cavity_susceptibility(2.0, params.kappa)) ** 2
    return 0.5 * (params.kappa / 2.0) * chi2 * params.g ** 2


def pm_correction_closed_form(params: TwoModeParams) -> float:
    """Closed form for the anti-squeezed-quadrature correction (negative).

    -eta (kappa/2) |chi_c(2)|^2 g^2 (C + 2 nbar + 1)^2 / 2; only accurate at
    backaction-dominated points, cf. the validity notes in the tests.
    """
    from .analytic import cooperativity

    chi2 = abs(cavity_susceptibility(2.0, params.kappa)) ** 2
    c = cooperativity(params)
    return (-params.eta * 0.5 * (params.kappa / 2.0) * chi2 * params.g ** 2
            * (c + 2.0 * params.nbar + 1.0) ** 2)


def _model_harmonics(model: ModelMatrices) -> tuple[np.ndarray, np.ndarray]:
    """A0 and A1 recovered from four drift samples (exact for one harmonic)."""
    t4 = [model.period * k / 4.0 for k in range(4)]
    samples = np.array([model.drift(t) for t in t4], dtype=complex)
    w_mod = 2.0 * math.pi / model.period
    phases0 = np.ones(4)
    phases1 = np.exp(-1j * w_mod * np.asarray(t4))
    a0 = np.tensordot(phases0, samples, axes=(0, 0)) / 4.0
    a1 = np.tensordot(phases1, samples, axes=(0, 0)) / 4.0
    return a0.real, a1
