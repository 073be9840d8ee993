"""Riccati flow of the conditional covariance and stochastic first moments.

The deterministic flow

    sigma' = A(t) sigma + sigma A(t)^T + D - (sigma B - N)(sigma B - N)^T

is integrated with fixed-step classical RK4.  The drift is periodic, so
steady states are found as fixed points of the period map; a Newton step
built from the monodromy of the linearized (congruence) flow turns the
slow gamma-limited relaxation into a handful of period integrations.  The
residual reported to callers is always a directly measured period-map
distance, never a Newton estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit
from scipy.linalg import solve_discrete_lyapunov

from .errors import ConvergenceError, DivergenceError, NumericalError, UnphysicalStateError
from .gaussian import PHYSICALITY_TOL, CovarianceMatrix, is_physical
from .model import ModelMatrices

DEFAULT_TOL = 1e-9
DEFAULT_MAX_PERIODS = 20000
DEFAULT_SAMPLES_PER_PERIOD = 64
_FULL_STEPS_PER_PERIOD = 1024
_RWA_STEPS_PER_PERIOD = 64


@njit(cache=True, nogil=True)
def _rhs(sig, a, d, b, n):
    u = sig @ b - n
    r = a @ sig + sig @ a.T + d - u @ u.T
    return 0.5 * (r + r.T)


@njit(cache=True, nogil=True)
def _advance(sig, agrid, d, b, n, dt, nsteps, start):
    """RK4 for `nsteps` from half-grid index offset `start` (in steps)."""
    m = agrid.shape[0]
    s = sig.copy()
    for i in range(nsteps):
        j = 2 * (start + i)
        a0 = agrid[j % m]
        a1 = agrid[(j + 1) % m]
        a2 = agrid[(j + 2) % m]
        k1 = _rhs(s, a0, d, b, n)
        k2 = _rhs(s + (0.5 * dt) * k1, a1, d, b, n)
        k3 = _rhs(s + (0.5 * dt) * k2, a1, d, b, n)
        k4 = _rhs(s + dt * k3, a2, d, b, n)
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s


@njit(cache=True, nogil=True)
def _advance_record(sig, agrid, d, b, n, dt, nsteps, start, stride):
    """Like _advance but stores the state every `stride` steps (including step 0)."""
    m = agrid.shape[0]
    dim = sig.shape[0]
    nrec = (nsteps + stride - 1) // stride
    out = np.empty((nrec, dim, dim))
    s = sig.copy()
    r = 0
    for i in range(nsteps):
        if i % stride == 0 and r < nrec:
            out[r] = s
            r += 1
        j = 2 * (start + i)
        a0 = agrid[j % m]
        a1 = agrid[(j + 1) % m]
        a2 = agrid[(j + 2) % m]
        k1 = _rhs(s, a0, d, b, n)
        k2 = _rhs(s + (0.5 * dt) * k1, a1, d, b, n)
        k3 = _rhs(s + (0.5 * dt) * k2, a1, d, b, n)
        k4 = _rhs(s + dt * k3, a2, d, b, n)
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s, out


@njit(cache=True, nogil=True)
def _advance_with_monodromy(sig, agrid, d, b, n, dt, nsteps):
    """One block of RK4 steps propagating sigma jointly with the monodromy Phi.

    Phi obeys Phi' = (A - (sigma B - N) B^T) Phi along the current orbit;
    perturbations of the flow evolve as Phi delta Phi^T.
    """
    m = agrid.shape[0]
    dim = sig.shape[0]
    s = sig.copy()
    phi = np.eye(dim)
    for i in range(nsteps):
        j = 2 * i
        a0 = agrid[j % m]
        a1 = agrid[(j + 1) % m]
        a2 = agrid[(j + 2) % m]
        k1 = _rhs(s, a0, d, b, n)
        l1 = (a0 - (s @ b - n) @ b.T) @ phi
        s2 = s + (0.5 * dt) * k1
        k2 = _rhs(s2, a1, d, b, n)
        l2 = (a1 - (s2 @ b - n) @ b.T) @ (phi + (0.5 * dt) * l1)
        s3 = s + (0.5 * dt) * k2
        k3 = _rhs(s3, a1, d, b, n)
        l3 = (a1 - (s3 @ b - n) @ b.T) @ (phi + (0.5 * dt) * l2)
        s4 = s + dt * k3
        k4 = _rhs(s4, a2, d, b, n)
        l4 = (a2 - (s4 @ b - n) @ b.T) @ (phi + dt * l3)
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        phi = phi + (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4)
    return s, phi


def riccati_rhs(sigma: CovarianceMatrix, model: ModelMatrices, t: float = 0.0) -> np.ndarray:
    """Symmetrized right-hand side of the covariance flow at time t."""
    arr = sigma.data
    if arr.shape[0] != 2 * model.n_modes:
        raise ValueError(f"state has {arr.shape[0]} quadratures, model needs {2 * model.n_modes}")
    a = model.drift(t)
    u = arr @ model.meas_b - model.meas_n
    r = a @ arr + arr @ a.T + model.diffusion - u @ u.T
    return 0.5 * (r + r.T)


class _Discretization:
    """Period-commensurate RK4 grid: dt divides the period, drift sampled on half-steps."""

    def __init__(self, model: ModelMatrices, dt: float | None, snap_to: int = 1):
        t_period = model.period
        if dt is None:
            steps = _RWA_STEPS_PER_PERIOD if model.rwa else _FULL_STEPS_PER_PERIOD
            # explicit RK4 stability: resolve the fastest decay scale
            rate = 2.0 * np.abs(model.drift(0.0)).max() + 1.5 * np.linalg.norm(model.meas_b, 2) ** 2
            steps = max(steps, int(math.ceil(t_period * rate / 1.5)))
        else:
            if dt <= 0:
                raise ValueError("dt must be positive")
            steps = max(1, int(round(t_period / dt)))
        # round up so the recording stride divides the period exactly
        steps = ((steps + snap_to - 1) // snap_to) * snap_to
        self.steps_per_period = steps
        self.dt = t_period / steps
        half = self.dt / 2.0
        self.agrid = np.ascontiguousarray(
            np.array([model.drift(i * half) for i in range(2 * steps)]))
        self.d = np.ascontiguousarray(model.diffusion)
        self.b = np.ascontiguousarray(model.meas_b)
        self.n = np.ascontiguousarray(model.meas_n)


@dataclass(frozen=True)
class PeriodicState:
    """Covariance samples over one period of the converged steady state."""

    phases: np.ndarray
    covariances: tuple
    converged: bool
    residual: float
    periods_used: int
    dt: float
    period: float
    residual_history: tuple

    def __post_init__(self):
        for ph, cm in zip(self.phases, self.covariances):
            if not is_physical(cm, PHYSICALITY_TOL):
                raise UnphysicalStateError(
                    f"periodic steady-state sample at phase {ph:.4f} is unphysical")

    @property
    def samples(self):
        """Ordered (phase, CovarianceMatrix) pairs; phases in [0, 1)."""
        return list(zip(self.phases.tolist(), self.covariances))

    @property
    def per_element_stats(self):
        """Entrywise min/mean/max over the period."""
        stack = np.array([cm.data for cm in self.covariances])
        return {"min": stack.min(axis=0), "mean": stack.mean(axis=0),
                "max": stack.max(axis=0)}

    @cached_property
    def mean_cm(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.per_element_stats["mean"])

    def sigma_at(self, t: float) -> np.ndarray:
        """Periodic linear interpolation of the sampled orbit."""
        stack = np.array([cm.data for cm in self.covariances])
        m = len(self.covariances)
        x = (t / self.period) % 1.0 * m
        i = int(x) % m
        frac = x - int(x)
        return (1.0 - frac) * stack[i] + frac * stack[(i + 1) % m]


def lyapunov_steady_state(a: np.ndarray, d: np.ndarray) -> CovarianceMatrix:
    """Solve A X + X A^T + D = 0 through the Kronecker-product linear system."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    if a.shape != d.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A and D must be square matrices of equal shape")
    if np.linalg.eigvals(a).real.max() >= 0:
        raise ValueError("drift matrix must be Hurwitz")
    n = a.shape[0]
    eye = np.eye(n)
    m = np.kron(a, eye) + np.kron(eye, a)
    x = np.linalg.solve(m, -d.reshape(-1)).reshape(n, n)
    return CovarianceMatrix(x)


def integrate_riccati(model: ModelMatrices, sigma0: CovarianceMatrix, dt: float,
                      t_end: float, store_stride: int | None = None):
    """Integrate the covariance flow from sigma0 for a time t_end.

    dt is snapped to an integer divisor of the drift period so the
    half-step drift grid closes exactly.  Returns (times, covariances)
    with every stored sample symmetrized and checked for physicality.

    Raises DivergenceError (with the offending time) if a sample leaves
    the physical cone, NumericalError on NaN.
    """
    disc = _Discretization(model, dt)
    nsteps = max(1, int(round(t_end / disc.dt)))
    if store_stride is None:
        store_stride = max(1, nsteps // 2048)
    sig = np.ascontiguousarray(sigma0.data)
    final, raw = _advance_record(sig, disc.agrid, disc.d, disc.b, disc.n,
                                 disc.dt, nsteps, 0, store_stride)
    stored = np.concatenate([raw, final[None]], axis=0)
    times = np.concatenate([np.arange(raw.shape[0]) * store_stride * disc.dt,
                            [nsteps * disc.dt]])
    if not np.all(np.isfinite(stored)):
        raise NumericalError("NaN/inf in Riccati integration")
    covs = []
    for t, s in zip(times, stored):
        cm = CovarianceMatrix(s)
        if not is_physical(cm, PHYSICALITY_TOL):
            raise DivergenceError(f"unphysical covariance at t={t:.6g}", time=float(t))
        covs.append(cm)
    return times, covs


def periodic_steady_state(model: ModelMatrices, dt: float | None = None,
                          tol: float = DEFAULT_TOL,
                          max_periods: int = DEFAULT_MAX_PERIODS,
                          samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
                          sigma0: np.ndarray | None = None,
                          newton: bool = True) -> PeriodicState:
    """Long-time periodic attractor of the covariance flow.

    Integrates the period map until ||sigma(t+T) - sigma(t)||_max < tol.
    With newton=True (default) each period also propagates the monodromy of
    the linearized flow and jumps to the fixed point of the affine period-map
    model by a discrete Lyapunov solve, which removes the gamma-limited
    relaxation; with newton=False the map is simply iterated.  Either way
    the reported residual is a measured period-map distance.

    Raises ConvergenceError when the period budget is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    disc = _Discretization(model, dt, snap_to=samples_per_period)
    spp = disc.steps_per_period
    sig = np.ascontiguousarray(sigma0 if sigma0 is not None else _default_sigma0(model))
    sig = 0.5 * (sig + sig.T)

    history: list[float] = []
    periods = 0
    converged = False
    residual = math.inf

    warmup = min(8, max_periods) if newton else 0
    for _ in range(warmup):
        nxt = _advance(sig, disc.agrid, disc.d, disc.b, disc.n, disc.dt, spp, 0)
        periods += 1
        residual = float(np.abs(nxt - sig).max())
        history.append(residual)
        sig = nxt

    while periods < max_periods:
        if newton:
            nxt, phi = _advance_with_monodromy(sig, disc.agrid, disc.d, disc.b,
                                               disc.n, disc.dt, spp)
        else:
            nxt = _advance(sig, disc.agrid, disc.d, disc.b, disc.n, disc.dt, spp, 0)
            phi = None
        periods += 1
        if not np.all(np.isfinite(nxt)):
            raise NumericalError("NaN/inf in periodic steady-state iteration")
        residual = float(np.abs(nxt - sig).max())
        history.append(residual)
        if residual < tol:
            sig = nxt
            converged = True
            break
        if phi is not None:
            guess = _newton_jump(sig, nxt, phi)
            sig = guess if guess is not None else nxt
        else:
            sig = nxt

    if not converged:
        raise ConvergenceError(
            f"period map not converged after {periods} periods (residual {residual:.3e})",
            residual=residual)

    stride = spp // samples_per_period
    _, raw = _advance_record(sig, disc.agrid, disc.d, disc.b, disc.n,
                             disc.dt, spp, 0, stride)
    phases = np.arange(samples_per_period) / samples_per_period
    covs = tuple(CovarianceMatrix(s) for s in raw)
    return PeriodicState(phases=phases, covariances=covs, converged=True,
                         residual=residual, periods_used=periods, dt=disc.dt,
                         period=model.period, residual_history=tuple(history))


def _newton_jump(sig, sig_next, phi):
    """Fixed point of the affine model s -> P(sig) + Phi (s - sig) Phi^T, or None."""
    try:
        q = sig_next - phi @ sig @ phi.T
        x = solve_discrete_lyapunov(phi, q)
    except Exception:
        return None
    x = 0.5 * (x + x.T)
    if not np.all(np.isfinite(x)) or np.abs(x).max() > 1e15:
        return None
    return np.ascontiguousarray(x)


def _default_sigma0(model: ModelMatrices) -> np.ndarray:
    # unconditional thermal-vacuum product; mechanics occupancy recovered from D
    gamma = -2.0 * model.drift(0.0)[-1, -1]
    occ = model.diffusion[-1, -1] / gamma
    mech = [occ] * (2 * (model.n_modes - 1))
    return np.diag([0.5, 0.5] + mech)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One stochastic first-moment trajectory with its innovation record."""

    times: np.ndarray
    means: np.ndarray
    currents: np.ndarray
    seed: int
    dt: float
    diagnostic_current: np.ndarray | None = None


def sample_trajectory(model: ModelMatrices, sigma_of_t, x0, seed: int, dt: float,
                      t_end: float, emit_current: bool = False) -> TrajectoryRecord:
    """Euler-Maruyama sample of the conditional means.

    d xbar = A xbar dt - (sigma B - N) dW with independent Wiener channels;
    the innovations dW on the monitored (optical) channels are stored as
    the homodyne record.  `sigma_of_t` may be a constant matrix, a
    PeriodicState, or a callable t -> matrix.  Runs are reproducible per
    seed (counter-based Philox generator).

    With emit_current=True the fast-cavity approximation of the homodyne
    current, I dt = 2 sqrt(gamma eta C) <X_m> dt + dW, is emitted alongside
    (two-mode model diagnostics).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    sigma_fun = _as_sigma_fun(sigma_of_t, model)
    n2 = 2 * model.n_modes
    nsteps = int(round(t_end / dt))
    rng = np.random.Generator(np.random.Philox(seed))
    dws = rng.standard_normal((nsteps, n2)) * math.sqrt(dt)
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (n2,):
        raise ValueError(f"x0 must have shape ({n2},)")
    times = np.arange(nsteps + 1) * dt
    means = np.empty((nsteps + 1, n2))
    means[0] = x
    b, nmat = model.meas_b, model.meas_n
    for i in range(nsteps):
        t = times[i]
        a = model.drift(t)
        gain = sigma_fun(t) @ b - nmat
        x = x + a @ x * dt - gain @ dws[i]
        means[i + 1] = x
    monitored = np.where(np.linalg.norm(b, axis=0) > 0)[0]
    currents = dws[:, monitored] if monitored.size else np.zeros((nsteps, 0))
    diag = None
    if emit_current:
        diag = _fast_cavity_current(model, means, dws, dt)
    return TrajectoryRecord(times=times, means=means, currents=currents,
                            seed=seed, dt=dt, diagnostic_current=diag)


def sample_mean_ensemble(model: ModelMatrices, sigma, n_traj: int, seed: int,
                         dt: float, t_end: float) -> np.ndarray:
    """Final conditional means of n_traj independent trajectories (batched).

    All trajectories start at zero mean and share the constant conditional
    covariance `sigma`; used for law-of-total-variance checks against the
    unconditional Lyapunov covariance.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n2 = 2 * model.n_modes
    nsteps = int(round(t_end / dt))
    rng = np.random.Generator(np.random.Philox(seed))
    a = model.drift(0.0)
    gain = np.asarray(sigma) @ model.meas_b - model.meas_n
    x = np.zeros((n_traj, n2))
    sqdt = math.sqrt(dt)
    for _ in range(nsteps):
        dw = rng.standard_normal((n_traj, n2)) * sqdt
        x = x + x @ a.T * dt - dw @ gain.T
    return x


def _as_sigma_fun(sigma_of_t, model: ModelMatrices):
    if isinstance(sigma_of_t, PeriodicState):
        return sigma_of_t.sigma_at
    if isinstance(sigma_of_t, CovarianceMatrix):
        const = sigma_of_t.data
        return lambda t: const
    if callable(sigma_of_t):
        return sigma_of_t
    const = np.asarray(sigma_of_t, dtype=float)
    if const.shape != (2 * model.n_modes,) * 2:
        raise ValueError("sigma_of_t must be a matrix, callable, or PeriodicState")
    return lambda t: const


def _fast_cavity_current(model: ModelMatrices, means, dws, dt):
    # I dt ~ 2 sqrt(gamma eta C) <X_m> dt + dW on the phase channel
    b = model.meas_b
    kappa = -2.0 * model.drift(0.0)[0, 0]
    gamma = -2.0 * model.drift(0.0)[-1, -1]
    g = model.drift(0.0)[3, 0] if model.rwa else 0.5 * (
        model.drift(0.0)[3, 0] + model.drift(model.period / 2.0)[3, 0])
    eta = b[1, 1] ** 2 / (2.0 * kappa) if kappa > 0 else 0.0
    coop = 4.0 * g * g / (kappa * gamma)
    rate = 2.0 * math.sqrt(max(gamma * eta * coop, 0.0))
    return rate * means[:-1, 2] * dt + dws[:, 1]
