"""Conditional Gaussian dynamics of two-tone backaction-evading measurements.

A mechanical oscillator parametrically coupled to a cavity driven on both
mechanical sidebands realizes a continuous measurement of a single motional
quadrature.  This package integrates the matrix Riccati equation of the
conditional covariance for the one- and two-oscillator variants, with and
without the counter-rotating coupling terms, cross-validates against exact
steady-state formulas and second-order perturbation theory, and quantifies
the resulting squeezing and entanglement.
"""

__version__ = "0.1.0"

from .analytic import (RwaSteadyState, adiabatic_variance, cooperativity,
                       kappa_opt, slow_cavity_variance, steady_state_rwa)
from .classify import SeparabilityReport, classify_three_mode, scan_region
from .errors import (ConvergenceError, DivergenceError, NumericalError,
                     UnphysicalStateError)
from .gaussian import (CovarianceMatrix, SymplecticForm, duan_sum, is_physical,
                       log_negativity, partial_transpose, purity, squeezing_db,
                       symplectic_eigenvalues, symplectic_form,
                       two_mode_squeezed_cm, two_mode_squeezing_db)
from .model import (MeasurementSpec, ModelMatrices, ThreeModeParams,
                    TwoModeParams, bath_covariance, build_model, derive_coupling,
                    diffusion, drift_three_mode, drift_two_mode,
                    measurement_matrices, thermal_product)
from .perturbation import (FourierCovariance, cavity_susceptibility,
                           fourier_covariance, fourier_drift_components,
                           pm_correction_closed_form, second_order_correction,
                           solve_sigma1, xm_correction_closed_form)
from .riccati import (PeriodicState, TrajectoryRecord, integrate_riccati,
                      lyapunov_steady_state, periodic_steady_state, riccati_rhs,
                      sample_mean_ensemble, sample_trajectory)

__all__ = [
    "CovarianceMatrix", "SymplecticForm", "symplectic_form",
    "symplectic_eigenvalues", "is_physical", "partial_transpose",
    "log_negativity", "duan_sum", "squeezing_db", "two_mode_squeezing_db",
    "purity", "two_mode_squeezed_cm",
    "TwoModeParams", "ThreeModeParams", "MeasurementSpec", "ModelMatrices",
    "derive_coupling", "bath_covariance", "diffusion", "drift_two_mode",
    "drift_three_mode", "measurement_matrices", "build_model", "thermal_product",
    "riccati_rhs", "integrate_riccati", "periodic_steady_state",
    "lyapunov_steady_state", "sample_trajectory", "sample_mean_ensemble",
    "PeriodicState", "TrajectoryRecord",
    "RwaSteadyState", "steady_state_rwa", "adiabatic_variance",
    "slow_cavity_variance", "kappa_opt", "cooperativity",
    "FourierCovariance", "fourier_drift_components", "solve_sigma1",
    "second_order_correction", "fourier_covariance", "cavity_susceptibility",
    "xm_correction_closed_form", "pm_correction_closed_form",
    "SeparabilityReport", "classify_three_mode", "scan_region",
    "UnphysicalStateError", "NumericalError", "DivergenceError", "ConvergenceError",
]
