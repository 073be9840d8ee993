"""Symplectic linear algebra and Gaussian-state functionals.

Conventions: hbar = 1, vacuum variance 1/2, quadratures interleaved as
(X1, P1, X2, P2, ...).  Physicality means every symplectic eigenvalue of
the covariance matrix is >= 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, UnphysicalStateError

PHYSICALITY_TOL = 1e-9


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric 2n x 2n matrix of symmetrized quadrature second moments.

    The stored array is symmetrized on construction and made read-only.
    Physicality is checked by :func:`is_physical`, never silently enforced.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise ValueError(f"covariance matrix must be square 2n x 2n, got {arr.shape}")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def n_modes(self) -> int:
        return self.data.shape[0] // 2

    def variance(self, quad: int) -> float:
        """Diagonal entry for quadrature index `quad` (0-based, interleaved)."""
        return float(self.data[quad, quad])

    def reduced(self, modes) -> "CovarianceMatrix":
        """Reduced state of the listed modes (Gaussian partial trace)."""
        idx = []
        for m in sorted(modes):
            if not 0 <= m < self.n_modes:
                raise ValueError(f"mode index {m} out of range for {self.n_modes} modes")
            idx.extend((2 * m, 2 * m + 1))
        return CovarianceMatrix(self.data[np.ix_(idx, idx)])


@dataclass(frozen=True)
class SymplecticForm:
    """Block-diagonal direct sum of 2x2 blocks [[0, 1], [-1, 0]]."""

    n_modes: int
    data: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        arr = _omega(self.n_modes)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)


def _omega(n_modes: int) -> np.ndarray:
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        out[2 * i, 2 * i + 1] = 1.0
        out[2 * i + 1, 2 * i] = -1.0
    return out


def symplectic_form(n_modes: int) -> SymplecticForm:
    """Symplectic form for `n_modes` modes in the interleaved ordering."""
    return SymplecticForm(n_modes)


def symplectic_eigenvalues(sigma: CovarianceMatrix) -> np.ndarray:
    """Williamson spectrum, ascending.

    Computed as the absolute values of the eigenvalues of i*Omega*sigma,
    which come in +/- pairs; one representative per pair is returned.  This
    also applies verbatim to partially transposed matrices.
    """
    arr = sigma.data
    if not np.allclose(arr, arr.T, atol=1e-10):
        raise ValueError("covariance matrix must be symmetric")
    om = _omega(sigma.n_modes)
    try:
        ev = np.linalg.eigvals(1j * om @ arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericalError("non-finite symplectic spectrum")
    return np.sort(np.abs(ev))[::2]


def is_physical(sigma: CovarianceMatrix, tol: float = PHYSICALITY_TOL) -> bool:
    """True iff the smallest symplectic eigenvalue is >= 1/2 - tol."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return bool(symplectic_eigenvalues(sigma).min() >= 0.5 - tol)


def partial_transpose(sigma: CovarianceMatrix, transposed_modes) -> CovarianceMatrix:
    """Flip the sign of the P quadrature of each listed mode (Lambda sigma Lambda)."""
    lam = np.ones(2 * sigma.n_modes)
    for m in set(transposed_modes):
        if not 0 <= m < sigma.n_modes:
            raise ValueError(f"mode index {m} out of range for {sigma.n_modes} modes")
        lam[2 * m + 1] = -1.0
    return CovarianceMatrix(sigma.data * np.outer(lam, lam))


def log_negativity(sigma: CovarianceMatrix, partition) -> float:
    """Logarithmic negativity across `partition` vs the rest.

    E_N = max(0, -ln(2 nu_min)) with nu_min the smallest symplectic
    eigenvalue after partially transposing the partition modes.  Natural
    logarithm.
    """
    if not is_physical(sigma):
        raise UnphysicalStateError("log_negativity requires a physical state")
    nu = symplectic_eigenvalues(partial_transpose(sigma, partition)).min()
    return max(0.0, -float(np.log(2.0 * nu)))


def duan_sum(sigma: CovarianceMatrix, mode_i: int, mode_j: int) -> float:
    """Var(X+) + Var(P-) for X+ = (Xi+Xj)/sqrt2, P- = (Pi-Pj)/sqrt2.

    Values below 1 certify entanglement of the pair.
    """
    n = sigma.n_modes
    if n < 2:
        raise ValueError("duan_sum needs at least two modes")
    if mode_i == mode_j or not (0 <= mode_i < n and 0 <= mode_j < n):
        raise ValueError(f"invalid mode pair ({mode_i}, {mode_j})")
    s = sigma.data
    xi, xj = 2 * mode_i, 2 * mode_j
    pi_, pj = xi + 1, xj + 1
    var_xp = 0.5 * (s[xi, xi] + s[xj, xj] + 2.0 * s[xi, xj])
    var_pm = 0.5 * (s[pi_, pi_] + s[pj, pj] - 2.0 * s[pi_, pj])
    return float(var_xp + var_pm)


def squeezing_db(variance: float) -> float:
    """-10 log10(2 var); positive means squeezed below vacuum.

    For two-mode squeezing pass the Duan sum: 0 dB then sits exactly at the
    separability boundary.
    """
    if variance <= 0:
        raise ValueError("variance must be positive")
    return float(-10.0 * np.log10(2.0 * variance))


def two_mode_squeezing_db(duan_value: float) -> float:
    """-10 log10(Duan sum): 0 dB at the separability boundary, violation positive.

    Equivalent to squeezing_db(duan/2), i.e. the Duan sum measured against
    its vacuum value of 1.
    """
    if duan_value <= 0:
        raise ValueError("Duan sum must be positive")
    return float(-10.0 * np.log10(duan_value))


def purity(sigma: CovarianceMatrix) -> float:
    """1 / (2^n sqrt(det sigma)) for an n-mode Gaussian state."""
    det = float(np.linalg.det(sigma.data))
    if det <= 0:
        raise UnphysicalStateError(f"non-positive determinant {det}")
    return float(1.0 / (2.0 ** sigma.n_modes * np.sqrt(det)))


def two_mode_squeezed_cm(r: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum with squeezing parameter r.

    Correlations are oriented so that X+ and P- are the squeezed
    combinations (Duan sum e^{-2r}).
    """
    ch, sh = 0.5 * np.cosh(2 * r), 0.5 * np.sinh(2 * r)
    c = np.diag([-sh, sh])
    a = ch * np.eye(2)
    return CovarianceMatrix(np.block([[a, c], [c, a]]))
