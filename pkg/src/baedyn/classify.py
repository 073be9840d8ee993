"""PPT-based separability analysis of the three-mode conditional state."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DivergenceError, NumericalError
from .gaussian import CovarianceMatrix, duan_sum, log_negativity
from .model import ThreeModeParams, build_model
from .riccati import periodic_steady_state

NPT_THRESHOLD = 1e-10

CLASS_FULLY_INSEPARABLE = "fully-inseparable"
CLASS_PPT_ALL = "ppt-wrt-all"
CLASS_TWO_BIPARTITION = "two-bipartition-entangled"
_MODE_NAMES = ("a", "b1", "b2")


@dataclass(frozen=True)
class SeparabilityReport:
    """Per-bipartition negativities and the resulting inseparability class.

    bipartition_negativity holds E_N for (a|b1 b2), (b1|a b2), (b2|a b1) in
    that order; duan_value is the Duan sum of the mechanical pair.
    """

    bipartition_negativity: tuple
    duan_value: float
    class_label: str
    parameters: Optional[ThreeModeParams] = field(default=None, compare=False)


def class_from_negativities(negativities) -> str:
    """Inseparability class from the three bipartition negativities.

    A bipartition counts as NPT when its negativity exceeds 1e-10.  All
    three NPT means genuine tripartite entanglement (fully-inseparable);
    none NPT is labeled ppt-wrt-all (such states may still be bound
    entangled, so they are never called separable).  With exactly one PPT
    cut the state is biseparable by splitting off that mode
    (one-mode-biseparable(x)); with exactly one NPT cut it is entangled
    across that single bipartition only, filed under
    two-bipartition-entangled (PPT with respect to the other two).
    """
    npt = [e > NPT_THRESHOLD for e in negativities]
    count = sum(npt)
    if count == 3:
        return CLASS_FULLY_INSEPARABLE
    if count == 0:
        return CLASS_PPT_ALL
    if count == 2:
        ppt_mode = _MODE_NAMES[npt.index(False)]
        return f"one-mode-biseparable({ppt_mode})"
    return CLASS_TWO_BIPARTITION


def classify_three_mode(sigma: CovarianceMatrix,
                        params: Optional[ThreeModeParams] = None) -> SeparabilityReport:
    """Classify a three-mode state by the PPT test on every 1-vs-2 bipartition."""
    if sigma.n_modes != 3:
        raise ValueError(f"classify_three_mode needs 3 modes, got {sigma.n_modes}")
    ens = tuple(log_negativity(sigma, {m}) for m in range(3))
    duan = duan_sum(sigma, 1, 2)
    return SeparabilityReport(bipartition_negativity=ens, duan_value=duan,
                              class_label=class_from_negativities(ens),
                              parameters=params)


def scan_region(kappas, gs, params: ThreeModeParams, rwa: bool = False,
                dt: float | None = None, tol: float = 1e-9,
                max_periods: int = 20000, threads: int = 1):
    """Classification map over a (kappa, g) grid.

    Each grid point is solved to its periodic steady state and classified
    on the time-averaged covariance; a second label computed from the
    over-period minimum of each negativity (and maximum Duan sum) is also
    emitted, since an oscillating state may cross class boundaries within
    a period.  Per-point failures are recorded in-row and do not abort the
    scan.  Rows are ordered by (kappa index, g index) regardless of thread
    count.
    """
    kappas = list(kappas)
    gs = list(gs)
    if not kappas or not gs:
        raise ValueError("grid must be non-empty")
    points = [(ik, ig, kap, g) for ik, kap in enumerate(kappas) for ig, g in enumerate(gs)]

    def solve_point(point):
        ik, ig, kap, g = point
        row = {"kappa_over_omega": kap, "g_over_omega": g}
        try:
            p = ThreeModeParams(g=g, kappa=kap, gamma=params.gamma, nbar=params.nbar,
                                eta=params.eta, omega_split=params.omega_split,
                                omega=params.omega)
            state = periodic_steady_state(build_model(p, rwa=rwa), dt=dt, tol=tol,
                                          max_periods=max_periods)
            report = classify_three_mode(state.mean_cm, p)
            per_sample = np.array([
                [log_negativity(cm, {m}) for m in range(3)] + [duan_sum(cm, 1, 2)]
                for cm in state.covariances])
            en_min = per_sample[:, :3].min(axis=0)
            duan_max = float(per_sample[:, 3].max())
            row.update({
                "class_label": report.class_label,
                "class_label_min": class_from_negativities(en_min),
                "E_N_a": report.bipartition_negativity[0],
                "E_N_b1": report.bipartition_negativity[1],
                "E_N_b2": report.bipartition_negativity[2],
                "duan_value": report.duan_value,
                "duan_max": duan_max,
                "duan_violation": report.duan_value < 1.0,
                "converged": state.converged,
                "residual": state.residual,
                "periods": state.periods_used,
                "error": "",
            })
        except (ConvergenceError, DivergenceError, NumericalError, ValueError) as exc:
            row.update({
                "class_label": "failed", "class_label_min": "failed",
                "E_N_a": float("nan"), "E_N_b1": float("nan"), "E_N_b2": float("nan"),
                "duan_value": float("nan"), "duan_max": float("nan"),
                "duan_violation": False, "converged": False,
                "residual": float("nan"), "periods": 0, "error": str(exc),
            })
        return row

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(solve_point, points))
    else:
        rows = [solve_point(pt) for pt in points]
    return rows
